//! The folklore method: codes `0, 1, ...` handed out in first-write order.
//!
//! Index `ℓ` gets code `f(ℓ) = k` on its first write, with `f⁻¹(k) = ℓ`
//! recorded and `k` incremented; its value lives in `A[f(ℓ)]`. `ℓ` has been
//! written iff `f(ℓ) < k` and `f⁻¹(f(ℓ)) = ℓ`. Both tables use packed
//! `⌈log₂ n⌉`-bit entries.

use crate::arena::{Arena, FillPolicy, ProbeCounts};
use crate::contract::{InitializableArray, ParamError, Violation};
use crate::word::{ceil_log2, Word};

#[derive(Debug)]
pub struct FolkloreArray<W: Word> {
    arena: Arena<W>,
    n: u64,
    init: W,
    /// Bits per table entry.
    e: u32,
    f_bit: u64,
    finv_bit: u64,
    counter: usize,
}

impl<W: Word> FolkloreArray<W> {
    pub fn new(n: usize, init: W, fill: FillPolicy) -> Result<Self, ParamError> {
        let n = n as u64;
        if n == 0 {
            return Err(ParamError::EmptyUniverse);
        }
        if W::BITS < 64 && n >> W::BITS != 0 {
            return Err(ParamError::UniverseTooLarge { n, w: W::BITS });
        }
        let w = W::BITS as u64;
        let e = ceil_log2(n);
        let table_words = (n * e as u64).div_ceil(w);
        let f_bit = n * w;
        let finv_bit = f_bit + table_words * w;
        let counter = (n + 2 * table_words) as usize;
        let mut arena = Arena::new(counter + 1, fill);
        arena.store(counter, W::zero());
        Ok(FolkloreArray { arena, n, init, e, f_bit, finv_bit, counter })
    }

    pub fn arena(&self) -> &Arena<W> {
        &self.arena
    }

    /// Number of codes handed out.
    pub fn codes(&self) -> u64 {
        self.arena.peek(self.counter).to_u64()
    }

    fn code(&self, index: u64) -> Option<u64> {
        let k = self.arena.load(self.counter).to_u64();
        let j = self.arena.load_field(self.f_bit + index * self.e as u64, self.e).to_u64();
        (j < k && self.arena.load_field(self.finv_bit + j * self.e as u64, self.e).to_u64() == index).then_some(j)
    }
}

impl<W: Word> InitializableArray<W> for FolkloreArray<W> {
    fn name(&self) -> String {
        "folklore".into()
    }

    fn len(&self) -> usize {
        self.n as usize
    }

    fn read(&self, index: usize) -> W {
        match self.code(index as u64) {
            Some(j) => self.arena.load(j as usize),
            None => self.init,
        }
    }

    fn initial_value(&self, _index: usize) -> W {
        self.init
    }

    fn write(&mut self, index: usize, value: W) {
        let i = index as u64;
        let j = match self.code(i) {
            Some(j) => j,
            None => {
                let k = self.arena.load(self.counter).to_u64();
                self.arena.store_field(self.f_bit + i * self.e as u64, self.e, W::truncate(k));
                self.arena.store_field(self.finv_bit + k * self.e as u64, self.e, W::truncate(i));
                self.arena.store(self.counter, W::truncate(k + 1));
                k
            }
        };
        self.arena.store(j as usize, value);
    }

    /// `n w + 2n⌈log₂ n⌉ + ⌈log₂(n+1)⌉`.
    fn space_bits(&self) -> u64 {
        self.n * W::BITS as u64 + 2 * self.n * self.e as u64 + ceil_log2(self.n + 1) as u64
    }

    fn probes(&self) -> ProbeCounts {
        self.arena.snapshot_counters()
    }

    fn validate(&self, shadow: &[Option<W>]) -> Result<(), Violation> {
        let written = shadow.iter().filter(|s| s.is_some()).count() as u64;
        if self.codes() != written {
            return Err(Violation::new("folklore", format!("{} codes for {written} written indices", self.codes())));
        }
        for (l, s) in shadow.iter().enumerate() {
            let got = self.read(l);
            if got != s.unwrap_or(self.init) {
                return Err(Violation::new("folklore", format!("index {l} reads wrong value")));
            }
        }
        Ok(())
    }
}
