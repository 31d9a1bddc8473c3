//! The light-path array for a universe that fills the tree exactly, `n = d^t`.

use std::cell::Cell;

use super::tree::{self, CaseStats, Color, TreeMemory, TreeShape, TreeView, WalkStats};
use crate::arena::{Arena, FillPolicy, ProbeCounts};
use crate::contract::{InitializableArray, ParamError, Violation};
use crate::word::Word;

/// Deliberate defects for mutation testing of the harness.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Drop the word move when a top node turns black.
    SkipCase5Move,
}

/// An arena of `W` words used directly as tree leaves, plus two root bits.
#[derive(Debug)]
pub(crate) struct LeafMemory<W: Word> {
    pub arena: Arena<W>,
    root: Color,
    root_reads: Cell<u64>,
    root_writes: u64,
    pub fault: Option<Fault>,
}

impl<W: Word + super::history::HistWord> LeafMemory<W> {
    pub fn new(arena: Arena<W>) -> Self {
        let mut mem = LeafMemory { arena, root: Color::Black, root_reads: Cell::new(0), root_writes: 0, fault: None };
        mem.set_root_color(Color::White);
        mem
    }

    pub fn probes(&self) -> ProbeCounts {
        let a = self.arena.snapshot_counters();
        ProbeCounts { reads: a.reads + self.root_reads.get(), writes: a.writes + self.root_writes, written: a.written }
    }

    pub fn root_writes(&self) -> u64 {
        self.root_writes
    }
}

impl<W: Word + super::history::HistWord> TreeView for LeafMemory<W> {
    type Value = W;

    #[inline]
    fn load(&self, leaf: u64) -> W {
        self.arena.load(leaf as usize)
    }

    fn peek(&self, leaf: u64) -> W {
        self.arena.peek(leaf as usize)
    }

    #[inline]
    fn root_color(&self) -> Color {
        self.root_reads.set(self.root_reads.get() + 1);
        self.root
    }

    fn peek_root_color(&self) -> Color {
        self.root
    }
}

impl<W: Word + super::history::HistWord> TreeMemory for LeafMemory<W> {
    #[inline]
    fn store(&mut self, leaf: u64, value: W) {
        self.arena.store(leaf as usize, value)
    }

    fn set_root_color(&mut self, color: Color) {
        self.root_writes += 1;
        self.root = color;
    }

    fn skip_case5_move(&self) -> bool {
        self.fault == Some(Fault::SkipCase5Move)
    }
}

/// Clearable array of exactly `d^t` words on a complete `d`-ary tree.
///
/// Occupies the `n` words of its arena plus two root bits. `d` and `t` are
/// construction parameters.
#[derive(Debug)]
pub struct LightPathArray<W: Word> {
    mem: LeafMemory<W>,
    shape: TreeShape,
    stats: CaseStats,
}

impl<W: Word + super::history::HistWord> LightPathArray<W> {
    pub fn new(d: u64, t: u32, fill: FillPolicy) -> Result<Self, ParamError> {
        let shape = TreeShape::new(d, t, <W as Word>::BITS)?;
        let n = shape.leaves().filter(|&c| c <= usize::MAX as u64).ok_or(ParamError::Other(format!(
            "tree with d = {d}, t = {t} is too large"
        )))?;
        Self::with_arena(Arena::new(n as usize, fill), d, t)
    }

    /// Uses an existing arena, which must hold exactly `d^t` cells.
    pub fn with_arena(arena: Arena<W>, d: u64, t: u32) -> Result<Self, ParamError> {
        let shape = TreeShape::new(d, t, <W as Word>::BITS)?;
        let cap = shape.leaves().unwrap_or(u64::MAX);
        if arena.len() as u64 != cap {
            return Err(ParamError::NotPerfectTree { n: arena.len() as u64, cap });
        }
        Ok(LightPathArray { mem: LeafMemory::new(arena), shape, stats: CaseStats::default() })
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

    /// Written positions in increasing order; exact, since a leaf is a position.
    pub fn iter_written(&self) -> (Vec<usize>, WalkStats) {
        let mut out = Vec::new();
        let stats = tree::for_each_black_leaf(&self.mem, &self.shape, self.len() as u64, &mut |l| out.push(l as usize));
        (out, stats)
    }

    #[doc(hidden)]
    pub fn inject_fault(&mut self, fault: Fault) {
        self.mem.fault = Some(fault);
    }

    #[doc(hidden)]
    pub fn corrupt_cell(&mut self, i: usize, x: W) {
        self.mem.arena.store(i, x);
    }
}

impl<W: Word + super::history::HistWord> InitializableArray<W> for LightPathArray<W> {
    fn name(&self) -> String {
        format!("lightpath-core(d={},t={})", self.shape.d(), self.shape.t)
    }

    fn len(&self) -> usize {
        self.mem.arena.len()
    }

    fn read(&self, index: usize) -> W {
        tree::read(&self.mem, &self.shape, index as u64)
    }

    fn write(&mut self, index: usize, value: W) {
        let n = self.len() as u64;
        let report = tree::write(&mut self.mem, &self.shape, n, index as u64, |_| value);
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
