//! Simulated uninitialized memory.
//!
//! An [`Arena`] is a fixed block of `w`-bit cells whose initial contents are
//! garbage chosen by a [`FillPolicy`]. Every load and store is counted, which
//! turns time and initialization-cost claims into observable numbers.

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::word::Word;

/// Initial garbage of a fresh arena.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FillPolicy {
    Zeros,
    Ones,
    /// `0101...` in even cells, `1010...` in odd cells.
    Alternating,
    /// ChaCha8 stream seeded with the given value, one draw per cell.
    Random(u64),
}

impl FillPolicy {
    /// The four policies used by the test harness, with the given random seed.
    pub fn all(seed: u64) -> [FillPolicy; 4] {
        [
            FillPolicy::Zeros,
            FillPolicy::Ones,
            FillPolicy::Alternating,
            FillPolicy::Random(seed),
        ]
    }
}

impl fmt::Display for FillPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FillPolicy::Zeros => f.write_str("zeros"),
            FillPolicy::Ones => f.write_str("ones"),
            FillPolicy::Alternating => f.write_str("alt"),
            FillPolicy::Random(seed) => write!(f, "rand:{seed}"),
        }
    }
}

impl FromStr for FillPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zeros" => Ok(FillPolicy::Zeros),
            "ones" => Ok(FillPolicy::Ones),
            "alt" | "alternating" => Ok(FillPolicy::Alternating),
            "rand" | "random" => Ok(FillPolicy::Random(0)),
            other => match other.strip_prefix("rand:") {
                Some(seed) => seed
                    .parse()
                    .map(FillPolicy::Random)
                    .map_err(|e| format!("bad seed in fill policy {other:?}: {e}")),
                None => Err(format!("unknown fill policy {other:?}")),
            },
        }
    }
}

/// Probe counters of an arena.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeCounts {
    pub reads: u64,
    pub writes: u64,
    /// Number of distinct cells written since creation.
    pub written: u64,
}

impl std::ops::Add for ProbeCounts {
    type Output = ProbeCounts;

    fn add(self, o: ProbeCounts) -> ProbeCounts {
        ProbeCounts {
            reads: self.reads + o.reads,
            writes: self.writes + o.writes,
            written: self.written + o.written,
        }
    }
}

impl std::ops::Sub for ProbeCounts {
    type Output = ProbeCounts;

    fn sub(self, o: ProbeCounts) -> ProbeCounts {
        ProbeCounts {
            reads: self.reads - o.reads,
            writes: self.writes - o.writes,
            written: self.written - o.written,
        }
    }
}

/// A block of uninitialized `W` cells.
///
/// Out-of-range accesses panic with an `arena fault` message; the structures
/// in this crate must never trigger one under legal operation sequences.
#[derive(Debug)]
pub struct Arena<W: Word> {
    cells: Vec<W>,
    fill: FillPolicy,
    reads: Cell<u64>,
    writes: u64,
    written: Vec<bool>,
    written_count: u64,
}

impl<W: Word> Arena<W> {
    pub fn new(len: usize, fill: FillPolicy) -> Self {
        let cells = match fill {
            FillPolicy::Zeros => vec![W::zero(); len],
            FillPolicy::Ones => vec![W::max_value(); len],
            FillPolicy::Alternating => {
                let even = crate::word::alt_mask::<W>(W::BITS / 2);
                let odd = !even;
                (0..len).map(|i| if i % 2 == 0 { even } else { odd }).collect()
            }
            FillPolicy::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..len).map(|_| W::truncate(rng.next_u64())).collect()
            }
        };
        Arena {
            cells,
            fill,
            reads: Cell::new(0),
            writes: 0,
            written: vec![false; len],
            written_count: 0,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn fill_policy(&self) -> FillPolicy {
        self.fill
    }

    #[inline]
    #[track_caller]
    fn check(&self, i: usize) {
        if i >= self.cells.len() {
            panic!("arena fault: cell {i} outside arena of {} cells", self.cells.len());
        }
    }

    #[inline]
    #[track_caller]
    pub fn load(&self, i: usize) -> W {
        self.check(i);
        self.reads.set(self.reads.get() + 1);
        self.cells[i]
    }

    #[inline]
    #[track_caller]
    pub fn store(&mut self, i: usize, x: W) {
        self.check(i);
        self.writes += 1;
        self.cells[i] = x;
        if !self.written[i] {
            self.written[i] = true;
            self.written_count += 1;
        }
    }

    /// Uncounted load, for validators and inspection.
    #[inline]
    #[track_caller]
    pub fn peek(&self, i: usize) -> W {
        self.check(i);
        self.cells[i]
    }

    pub fn snapshot_counters(&self) -> ProbeCounts {
        ProbeCounts {
            reads: self.reads.get(),
            writes: self.writes,
            written: self.written_count,
        }
    }

    pub fn was_written(&self, i: usize) -> bool {
        self.written[i]
    }

    /// Loads the `len`-bit field starting at absolute bit `bit`
    /// (bit `k` of the arena is bit `k mod w` of cell `k / w`).
    pub fn load_field(&self, bit: u64, len: u32) -> W {
        debug_assert!(len <= W::BITS);
        if len == 0 {
            return W::zero();
        }
        let w = W::BITS as u64;
        let cell = (bit / w) as usize;
        let off = (bit % w) as u32;
        let lo = self.load(cell).shr_trunc(off);
        let got = W::BITS - off;
        let v = if got < len {
            lo | self.load(cell + 1).shl_mod(got)
        } else {
            lo
        };
        v & W::low_ones(len)
    }

    /// Stores the low `len` bits of `x` at absolute bit `bit`, leaving the
    /// surrounding bits of the touched cells unchanged.
    pub fn store_field(&mut self, bit: u64, len: u32, x: W) {
        debug_assert!(len <= W::BITS);
        if len == 0 {
            return;
        }
        let w = W::BITS as u64;
        let cell = (bit / w) as usize;
        let off = (bit % w) as u32;
        let x = x & W::low_ones(len);
        let here = len.min(W::BITS - off);
        let mask = W::low_ones(here).shl_mod(off);
        let old = self.load(cell);
        self.store(cell, (old & !mask) | (x.shl_mod(off) & mask));
        if here < len {
            let rest = len - here;
            let mask = W::low_ones(rest);
            let old = self.load(cell + 1);
            self.store(cell + 1, (old & !mask) | (x.shr_trunc(here) & mask));
        }
    }
}
