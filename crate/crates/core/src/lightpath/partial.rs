//! The light-path array for any `n <= d^t`, using exactly `n` words.
//!
//! Leaves `n..d^t` do not exist. Until the first write, `n` is kept in
//! `A[0]`; that write replaces it by an artificial history in which the
//! missing leaves are black, so no proxy ever lands on one of them.

use super::core_array::{Fault, LeafMemory};
use super::history::HistWord;
use super::tree::{self, CaseStats, Color, TreeMemory, TreeShape, TreeView, WalkStats};
use crate::arena::{Arena, FillPolicy, ProbeCounts};
use crate::contract::{InitializableArray, ParamError, Violation};
use crate::word::Word;

#[derive(Debug)]
pub struct PartialLightPathArray<W: Word> {
    mem: LeafMemory<W>,
    shape: TreeShape,
    stats: CaseStats,
}

impl<W: Word + HistWord> PartialLightPathArray<W> {
    pub fn new(n: usize, d: u64, t: u32, fill: FillPolicy) -> Result<Self, ParamError> {
        Self::with_arena(Arena::new(n, fill), d, t)
    }

    /// Uses an existing arena of `n` cells.
    pub fn with_arena(arena: Arena<W>, d: u64, t: u32) -> Result<Self, ParamError> {
        let shape = TreeShape::new(d, t, <W as Word>::BITS)?;
        let n = arena.len() as u64;
        if n == 0 {
            return Err(ParamError::EmptyUniverse);
        }
        if let Some(cap) = shape.leaves() {
            if n > cap {
                return Err(ParamError::TreeTooSmall { n, cap });
            }
        }
        if shape.is_partial(n) && (<W as Word>::BITS < 64 && n >> <W as Word>::BITS != 0) {
            return Err(ParamError::UniverseTooLarge { n, w: <W as Word>::BITS });
        }
        let mut mem = LeafMemory::new(arena);
        if shape.is_partial(n) {
            mem.store(0, W::truncate(n));
        }
        Ok(PartialLightPathArray { mem, shape, stats: CaseStats::default() })
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn arena(&self) -> &Arena<W> {
        &self.mem.arena
    }

    pub fn root_color(&self) -> Color {
        self.mem.peek_root_color()
    }

    pub fn root_writes(&self) -> u64 {
        self.mem.root_writes()
    }

    /// Written positions in increasing order. Missing leaves are never reported.
    pub fn iter_written(&self) -> (Vec<usize>, WalkStats) {
        let mut out = Vec::new();
        let stats = tree::for_each_black_leaf(&self.mem, &self.shape, self.len() as u64, &mut |l| out.push(l as usize));
        (out, stats)
    }

    #[doc(hidden)]
    pub fn inject_fault(&mut self, fault: Fault) {
        self.mem.fault = Some(fault);
    }
}

impl<W: Word + HistWord> InitializableArray<W> for PartialLightPathArray<W> {
    fn name(&self) -> String {
        format!("lightpath-partial(d={},t={})", self.shape.d(), self.shape.t)
    }

    fn len(&self) -> usize {
        self.mem.arena.len()
    }

    fn read(&self, index: usize) -> W {
        tree::read(&self.mem, &self.shape, index as u64)
    }

    fn write(&mut self, index: usize, value: W) {
        let m = if self.shape.is_partial(self.len() as u64) && self.mem.root_color() == Color::White {
            self.mem.load(0).to_u64()
        } else {
            self.len() as u64
        };
        let report = tree::write(&mut self.mem, &self.shape, m, index as u64, |_| value);
        self.stats.record(report);
    }

    fn space_bits(&self) -> u64 {
        self.len() as u64 * <W as Word>::BITS as u64 + 2
    }

    fn probes(&self) -> ProbeCounts {
        self.mem.probes()
    }

    fn validate(&self, shadow: &[Option<W>]) -> Result<(), Violation> {
        tree::validate(&self.mem, &self.shape, self.len() as u64, &|l| shadow[l as usize])
    }

    fn case_stats(&self) -> Option<CaseStats> {
        Some(self.stats)
    }
}
