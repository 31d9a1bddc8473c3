use lightpath::arena::FillPolicy;
use lightpath::clearable::{predicted_init_writes, redundancy_bound, ClearableArray, Representation};
use lightpath::contract::InitializableArray;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sweep<W: lightpath::word::Word>(n: usize, t: u32, fill: FillPolicy, seed: u64, validate_every: usize) -> ClearableArray<W>
where
    rand::distr::StandardUniform: rand::distr::Distribution<W>,
{
    let mut a = ClearableArray::<W>::new(n, t, fill).unwrap();
    let mut shadow: Vec<Option<W>> = vec![None; n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for (step, &l) in order.iter().enumerate() {
        let x: W = rng.random();
        a.write(l, x);
        shadow[l] = Some(x);
        let probe = rng.random_range(0..n);
        assert_eq!(a.read(probe), shadow[probe].unwrap_or(W::zero()), "n={n} t={t} step {step}");
        if validate_every > 0 && step % validate_every == 0 {
            a.validate(&shadow).unwrap_or_else(|v| panic!("n={n} t={t} step {step}: {v}"));
        }
    }
    a.validate(&shadow).unwrap();
    for l in 0..n {
        assert_eq!(a.read(l), shadow[l].unwrap());
    }
    a
}

#[test]
fn full_sweeps_reach_all_black() {
    for n in [1usize, 5, 21, 22, 23, 44, 100, 500, 1000, 3000] {
        for t in [1u32, 2, 3] {
            for fill in FillPolicy::all(2) {
                let a = sweep::<u64>(n, t, fill, n as u64 * 7 + t as u64, 1);
                assert_eq!(a.representation(), Representation::AllBlack, "n={n} t={t}");
                assert_eq!(a.space_bits(), n as u64 * 64 + 1);
                for l in 0..n {
                    assert_eq!(a.arena().peek(1 + l), a.read(l));
                }
            }
        }
    }
}

#[test]
fn small_words_and_forest_representation() {
    for n in [30usize, 200, 255] {
        for t in [1u32, 2, 3, 8] {
            sweep::<u8>(n, t, FillPolicy::Random(4), 11, 1);
        }
    }
    for n in [2000usize, 20000] {
        for t in [1u32, 2] {
            sweep::<u16>(n, t, FillPolicy::Alternating, 5, 97);
        }
    }
    let a = ClearableArray::<u64>::new(1 << 22, 1, FillPolicy::Ones).unwrap();
    assert_eq!(a.representation(), Representation::Forest);
}

#[test]
fn space_and_init() {
    for k in [10u32, 16, 20] {
        let n = 1usize << k;
        for t in [1, 2, 3, k] {
            let a = ClearableArray::<u64>::new(n, t, FillPolicy::Random(1)).unwrap();
            let bound = n as u64 * 64 + redundancy_bound(n as u64, t, 64);
            assert!(a.space_bits() <= bound, "n=2^{k} t={t}: {} > {bound} ({:?})", a.space_bits(), a.representation());
            assert_eq!(a.init_probes().writes, predicted_init_writes(n as u64, t, 64));
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for _ in 0..2000 {
                let l = rng.random_range(0..n);
                assert_eq!(a.read(l), 0);
            }
        }
    }
}

#[test]
fn many_trees_few_roots_to_all_black() {
    // w = 32, t = 1: trees of 256 large words, 10 of them.
    let n = 22 * 256 * 9 + 1000;
    let a = sweep::<u32>(n, 1, FillPolicy::Random(8), 1, 4001);
    assert_eq!(a.representation(), Representation::AllBlack);
}

#[test]
fn forest_representation_random_ops() {
    let n = 22 * 512 * 128 + 13;
    let mut a = ClearableArray::<u64>::new(n, 1, FillPolicy::Random(6)).unwrap();
    assert_eq!(a.representation(), Representation::Forest);
    let mut shadow: Vec<Option<u64>> = vec![None; n];
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40000 {
        // cluster writes so some trees fill up
        let l = if rng.random_bool(0.5) { rng.random_range(0..22 * 512 * 2) } else { rng.random_range(0..n) };
        let x: u64 = rng.random();
        a.write(l, x);
        shadow[l] = Some(x);
        let p = rng.random_range(0..n);
        assert_eq!(a.read(p), shadow[p].unwrap_or(0));
    }
    for l in 0..22 * 512 * 2 {
        a.write(l, l as u64);
        shadow[l] = Some(l as u64);
    }
    a.validate(&shadow).unwrap();
    let bound = n as u64 * 64 + redundancy_bound(n as u64, 1, 64);
    assert!(a.space_bits() <= bound);
}
