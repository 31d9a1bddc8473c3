//! Certification of possibly-garbage words through a pair of cross-linked
//! tables and a counter.
//!
//! Word `k` of a managed region counts as initialized iff `f[k] < counter`
//! and `finv[f[k]] == k`. Garbage can never fake this, because every
//! `finv[j]` with `j < counter` was written when `j` was handed out.

use crate::arena::Arena;
use crate::word::{ceil_log2, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Certifier {
    f: usize,
    finv: usize,
    counter: usize,
    len: u64,
}

impl Certifier {
    /// Tables for `len` words starting at cell `base`: `f`, then `finv`,
    /// then the counter cell.
    pub fn at(base: usize, len: u64) -> Self {
        Certifier { f: base, finv: base + len as usize, counter: base + 2 * len as usize, len }
    }

    pub fn cells(len: u64) -> usize {
        2 * len as usize + 1
    }

    /// Bits charged: two tables of `len` words plus a counter in `0..=len`.
    pub fn space_bits(len: u64, w: u32) -> u64 {
        2 * len * w as u64 + ceil_log2(len + 1) as u64
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn init<W: Word>(&self, arena: &mut Arena<W>) {
        arena.store(self.counter, W::zero());
    }

    pub fn is_certified<W: Word>(&self, arena: &Arena<W>, k: u64) -> bool {
        let c = arena.load(self.counter).to_u64();
        if c == 0 {
            return false;
        }
        let j = arena.load(self.f + k as usize).to_u64();
        j < c && arena.load(self.finv + j as usize).to_u64() == k
    }

    /// Certifies word `k`, which must not be certified yet.
    pub fn certify<W: Word>(&self, arena: &mut Arena<W>, k: u64) {
        let c = arena.load(self.counter).to_u64();
        debug_assert!(c < self.len);
        arena.store(self.f + k as usize, W::truncate(c));
        arena.store(self.finv + c as usize, W::truncate(k));
        arena.store(self.counter, W::truncate(c + 1));
    }

    /// Uncounted check for validators.
    pub fn peek_certified<W: Word>(&self, arena: &Arena<W>, k: u64) -> bool {
        let c = arena.peek(self.counter).to_u64();
        if c == 0 {
            return false;
        }
        let j = arena.peek(self.f + k as usize).to_u64();
        j < c && arena.peek(self.finv + j as usize).to_u64() == k
    }

    /// The word certified with code `j`, uncounted.
    pub fn peek_code_owner<W: Word>(&self, arena: &Arena<W>, j: u64) -> u64 {
        arena.peek(self.finv + j as usize).to_u64()
    }

    pub fn peek_counter<W: Word>(&self, arena: &Arena<W>) -> u64 {
        arena.peek(self.counter).to_u64()
    }
}
