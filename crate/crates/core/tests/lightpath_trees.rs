use lightpath::arena::{Arena, FillPolicy};
use lightpath::contract::InitializableArray;
use lightpath::lightpath::{Color, Forest, LightPathArray, PartialLightPathArray};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn drive<A: InitializableArray<u64>>(a: &mut A, ops: usize, seed: u64, check_every: usize) {
    let n = a.len();
    let mut shadow: Vec<Option<u64>> = vec![None; n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for step in 0..ops {
        let l = rng.random_range(0..n);
        if rng.random_bool(0.5) {
            let x: u64 = rng.random();
            a.write(l, x);
            shadow[l] = Some(x);
            if check_every > 0 && step % check_every == 0 {
                if let Err(v) = a.validate(&shadow) {
                    panic!("{} step {step} write {l}: {v}", a.name());
                }
            }
        } else {
            assert_eq!(a.read(l), shadow[l].unwrap_or(0), "{} step {step} read {l}", a.name());
        }
    }
    a.validate(&shadow).unwrap();
    for (l, s) in shadow.iter().enumerate() {
        assert_eq!(a.read(l), s.unwrap_or(0));
    }
}

#[test]
fn core_matches_plain_array() {
    for (d, t) in [(2, 1), (2, 2), (2, 3), (2, 4), (4, 1), (4, 2), (4, 3), (8, 1), (8, 2), (8, 3), (8, 4)] {
        for fill in FillPolicy::all(1) {
            for seed in 0..4 {
                let mut a = LightPathArray::<u64>::new(d, t, fill).unwrap();
                drive(&mut a, 3000, seed, 1);
            }
        }
    }
}

#[test]
fn core_full_sweep_ends_black() {
    let mut a = LightPathArray::<u64>::new(4, 3, FillPolicy::Ones).unwrap();
    for l in (0..64).rev() {
        a.write(l, l as u64 + 100);
    }
    assert_eq!(a.root_color(), Color::Black);
    for l in 0..64 {
        assert_eq!(a.arena().peek(l), l as u64 + 100);
    }
}

#[test]
fn partial_every_size() {
    for (d, t) in [(2, 3), (2, 4), (4, 2), (4, 3)] {
        let cap = (d as usize).pow(t);
        for n in 1..=cap {
            for fill in FillPolicy::all(7) {
                let mut a = PartialLightPathArray::<u64>::with_arena(Arena::new(n, fill), d, t).unwrap();
                drive(&mut a, 200, n as u64, 1);
            }
        }
    }
}

#[test]
fn forest_matches_plain_array() {
    for n in [1usize, 2, 15, 16, 17, 37, 1024, 5000] {
        for t in [1u32, 2, 3, 64] {
            let mut a = Forest::<u64>::new(n, t, FillPolicy::Random(3)).unwrap();
            drive(&mut a, 4000, n as u64 + t as u64, 50);
        }
    }
}

#[test]
fn forest_small_words() {
    for n in [1usize, 100, 1000, 4000] {
        for t in [1u32, 2, 3] {
            let mut a = Forest::<u8>::new(n, t, FillPolicy::Alternating).unwrap();
            let mut shadow = vec![None; n];
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            for _ in 0..3000 {
                let l = rng.random_range(0..n);
                let x: u8 = rng.random();
                a.write(l, x);
                shadow[l] = Some(x);
            }
            a.validate(&shadow).unwrap();
            for l in 0..n {
                assert_eq!(a.read(l), shadow[l].unwrap_or(0));
            }
        }
    }
}
