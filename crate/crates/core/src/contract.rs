//! The clearable-array contract shared by every method in the crate.

use thiserror::Error;

use crate::arena::ProbeCounts;
use crate::lightpath::tree::CaseStats;
use crate::word::Word;

/// Rejected construction parameters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("universe size must be at least 1")]
    EmptyUniverse,
    #[error("universe size {n} does not fit a {w}-bit word")]
    UniverseTooLarge { n: u64, w: u32 },
    #[error("degree {d} is not a power of two >= 2")]
    DegreeNotPowerOfTwo { d: u64 },
    #[error("2*d*t = {need} exceeds the {avail} bits available for a history")]
    HistoryTooWide { need: u64, avail: u64 },
    #[error("universe size {n} exceeds the {cap} leaves of the tree")]
    TreeTooSmall { n: u64, cap: u64 },
    #[error("universe size {n} must equal d^t = {cap}")]
    NotPerfectTree { n: u64, cap: u64 },
    #[error("entry width {b} must lie in 1..={w}")]
    BadEntryWidth { b: u32, w: u32 },
    #[error("parameter {name} must be at least 1")]
    Zero { name: &'static str },
    #[error("arena has {got} cells, the structure needs {need}")]
    ArenaSize { got: usize, need: usize },
    #[error("{0}")]
    Other(String),
}

/// A broken storage or structural invariant found by a validator.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invariant {invariant} violated: {detail}")]
pub struct Violation {
    pub invariant: &'static str,
    pub detail: String,
}

impl Violation {
    pub fn new(invariant: &'static str, detail: impl Into<String>) -> Self {
        Violation { invariant, detail: detail.into() }
    }
}

/// An array of `len()` entries, all zero (or the method's initial value)
/// right after construction, supporting `read` and `write` of single entries.
///
/// Indices must be below `len()`. Methods operating close to minimum space
/// do not store `n` and cannot detect violations; out-of-range calls may hit
/// an arena fault.
pub trait InitializableArray<W: Word> {
    fn name(&self) -> String;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn read(&self, index: usize) -> W;

    /// What `read(index)` returns before the first write to `index`.
    fn initial_value(&self, _index: usize) -> W {
        W::zero()
    }

    fn write(&mut self, index: usize, value: W);

    /// Total bits occupied, auxiliary state included.
    fn space_bits(&self) -> u64;

    /// Width of one entry in bits.
    fn entry_bits(&self) -> u32 {
        W::BITS
    }

    /// Bits used beyond `len() * entry_bits()`.
    fn redundancy_bits(&self) -> u64 {
        self.space_bits() - self.len() as u64 * self.entry_bits() as u64
    }

    fn probes(&self) -> ProbeCounts;

    /// Checks internal invariants against the harness's record of the client
    /// sequence (`None` = never written).
    fn validate(&self, _shadow: &[Option<W>]) -> Result<(), Violation> {
        Ok(())
    }

    /// Light-path update case counters, for methods that have them.
    fn case_stats(&self) -> Option<CaseStats> {
        None
    }
}

impl<W: Word, A: InitializableArray<W> + ?Sized> InitializableArray<W> for Box<A> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn len(&self) -> usize {
        (**self).len()
    }
    fn read(&self, index: usize) -> W {
        (**self).read(index)
    }
    fn initial_value(&self, index: usize) -> W {
        (**self).initial_value(index)
    }
    fn write(&mut self, index: usize, value: W) {
        (**self).write(index, value)
    }
    fn space_bits(&self) -> u64 {
        (**self).space_bits()
    }
    fn entry_bits(&self) -> u32 {
        (**self).entry_bits()
    }
    fn probes(&self) -> ProbeCounts {
        (**self).probes()
    }
    fn validate(&self, shadow: &[Option<W>]) -> Result<(), Violation> {
        (**self).validate(shadow)
    }
    fn case_stats(&self) -> Option<CaseStats> {
        (**self).case_stats()
    }
}
