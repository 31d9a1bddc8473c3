//! A clearable word array that needs only its arena: `n` and `t` live
//! inside the structure.
//!
//! Cell 0 is the discriminator. When it is 0 the array is *all black*:
//! entry `ℓ` is cell `1 + ℓ`. When it is 1, cells 1 and 2 hold `n` and `t`,
//! and one of two tree-based representations applies, chosen by the number
//! `N` of trees over large words of `C' = 22` cells:
//!
//! * few roots (`N < 2w`): the large words sit at cells `1 + 22g`. The
//!   first large word keeps a 6-cell header (`n`, `t`, four words of root
//!   bits) and lends its other 16 cells to the history of the first
//!   nonblack tree `f`; logical large words `(0,0)` and `(f,0)` are swapped
//!   to make this work. When tree `f` turns black the swap is moved to the
//!   next nonblack tree, and when none is left the array becomes all black.
//! * many roots (`N >= 2w`): a forest follows `n` and `t` from cell 3 on.
//!
//! Universes below 22 entries are all black from the start.

use std::cell::Cell;

use crate::arena::{Arena, FillPolicy, ProbeCounts};
use crate::contract::{InitializableArray, ParamError, Violation};
use crate::lightpath::forest::ForestLayout;
use crate::lightpath::history::{HistWord, LargeWord};
use crate::lightpath::tree::{self, CaseStats, Color, TreeMemory, TreeShape, TreeView, WalkStats};
use crate::word::{alt_mask, Word};

/// Cells per large word.
pub const LARGE: usize = 22;
/// Header cells at the front of physical large word 0.
const HEADER: usize = 6;
const HIST_CELLS: usize = LARGE - HEADER;

type Lw<W> = LargeWord<W, LARGE>;

/// Which layout the arena currently holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Representation {
    AllBlack,
    FewRoots,
    Forest,
}

/// Redundancy bound `⌈n (t/(2w))^t⌉`, computed exactly for word lengths
/// that are powers of two.
pub fn redundancy_bound(n: u64, t: u32, w: u32) -> u64 {
    assert!(w.is_power_of_two());
    // n t^t as little-endian 32-bit limbs, then a ceiling shift by t log2(2w).
    let mut limbs: Vec<u64> = vec![n & 0xffff_ffff, n >> 32];
    for _ in 0..t {
        let mut carry = 0u64;
        for l in limbs.iter_mut() {
            let v = *l * t as u64 + carry;
            *l = v & 0xffff_ffff;
            carry = v >> 32;
        }
        while carry != 0 {
            limbs.push(carry & 0xffff_ffff);
            carry >>= 32;
        }
    }
    let shift = (t * (w.trailing_zeros() + 1)) as usize;
    let bit = |i: usize| limbs.get(i / 32).is_some_and(|l| l >> (i % 32) & 1 == 1);
    let total = limbs.len() * 32;
    let mut q: u64 = 0;
    for i in (shift..total).rev() {
        q = (q << 1) | bit(i) as u64;
    }
    let rem = (0..shift.min(total)).any(bit);
    q + rem as u64
}

#[derive(Clone, Copy, Debug)]
struct Geometry {
    n: u64,
    layout: ForestLayout,
}

impl Geometry {
    fn new(n: u64, t: u32, w: u32) -> Result<Self, ParamError> {
        Ok(Geometry { n, layout: ForestLayout::new(0, n, t, LARGE, w)? })
    }

    fn representation(&self, w: u32) -> Representation {
        match self.layout.trees {
            0 => Representation::AllBlack,
            k if k < 2 * w as u64 => Representation::FewRoots,
            _ => Representation::Forest,
        }
    }

    fn shape(&self) -> &TreeShape {
        &self.layout.shape
    }

    fn trees(&self) -> u64 {
        self.layout.trees
    }

    /// First large word of tree `i`.
    fn tree_start(&self, i: u64) -> u64 {
        if i == 0 {
            0
        } else {
            i << self.shape().leaves_log()
        }
    }
}

/// Root-bit word `k` of the few-roots header.
#[inline]
fn root_word_cell(k: u64) -> usize {
    3 + k as usize
}

#[inline]
fn lw_cell(p: u64, e: usize) -> usize {
    1 + p as usize * LARGE + e
}

/// First tree whose root is not black, by scanning the header root words.
fn first_nonblack<W: Word>(arena: &Arena<W>, trees: u64, peek: bool) -> Option<u64> {
    let w = W::BITS as u64;
    let words = (2 * trees).div_ceil(w);
    for k in 0..words {
        let word = if peek { arena.peek(root_word_cell(k)) } else { arena.load(root_word_cell(k)) };
        let pairs_here = (trees - k * w / 2).min(w / 2) as u32;
        let nonblack = !word.shr_trunc(1) & alt_mask::<W>(pairs_here);
        if !nonblack.is_zero() {
            return Some(k * w / 2 + crate::word::lsb(nonblack) as u64 / 2);
        }
    }
    None
}

/// One tree of the few-roots representation.
struct FewRootsTree<'a, W: Word, A> {
    arena: A,
    geo: &'a Geometry,
    tree: u64,
    first: &'a Cell<Option<u64>>,
    /// Set once the last tree turned black during this operation.
    all_black: &'a Cell<bool>,
    _w: std::marker::PhantomData<W>,
}

impl<W: Word, A: std::ops::Deref<Target = Arena<W>>> FewRootsTree<'_, W, A> {
    /// Physical large word holding leaf `k`, and whether it is the rotated
    /// header word.
    fn place(&self, k: u64) -> (u64, bool) {
        let g = self.geo.tree_start(self.tree) + k;
        if self.all_black.get() {
            return (g, false);
        }
        let f = self.first.get().expect("nonblack tree exists while discriminator is set");
        if k == 0 && self.tree == f {
            (0, true)
        } else if g == 0 {
            (self.geo.tree_start(f), false)
        } else {
            (g, false)
        }
    }

    fn get(&self, k: u64, peek: bool) -> Lw<W> {
        let ld = |c: usize| if peek { self.arena.peek(c) } else { self.arena.load(c) };
        let (p, rotated) = self.place(k);
        let mut v = Lw::<W>::zero();
        if rotated {
            for e in 0..HIST_CELLS {
                v.set_cell(e, ld(lw_cell(0, HEADER + e)));
            }
        } else {
            for e in 0..LARGE {
                v.set_cell(e, ld(lw_cell(p, e)));
            }
        }
        v
    }

    fn color(&self, peek: bool) -> Color {
        if self.all_black.get() {
            return Color::Black;
        }
        let bit = 2 * self.tree;
        let w = W::BITS as u64;
        let c = root_word_cell(bit / w);
        let word = if peek { self.arena.peek(c) } else { self.arena.load(c) };
        Color::from_bits((word.shr_trunc((bit % w) as u32).to_u64() & 3) as u8)
    }
}

impl<W: Word, A: std::ops::Deref<Target = Arena<W>>> TreeView for FewRootsTree<'_, W, A> {
    type Value = Lw<W>;

    fn load(&self, leaf: u64) -> Lw<W> {
        self.get(leaf, false)
    }

    fn peek(&self, leaf: u64) -> Lw<W> {
        self.get(leaf, true)
    }

    fn root_color(&self) -> Color {
        self.color(false)
    }

    fn peek_root_color(&self) -> Color {
        self.color(true)
    }
}

impl<W: Word, A: std::ops::DerefMut<Target = Arena<W>>> TreeMemory for FewRootsTree<'_, W, A> {
    fn store(&mut self, leaf: u64, value: Lw<W>) {
        let (p, rotated) = self.place(leaf);
        if rotated {
            // Only histories are stored here; the header cells stay untouched.
            debug_assert!((HIST_CELLS..LARGE).all(|e| value.cell(e).is_zero()), "value overlaps header");
            for e in 0..HIST_CELLS {
                self.arena.store(lw_cell(0, HEADER + e), value.cell(e));
            }
        } else {
            for e in 0..LARGE {
                self.arena.store(lw_cell(p, e), value.cell(e));
            }
        }
    }

    fn set_root_color(&mut self, color: Color) {
        let bit = 2 * self.tree;
        let w = W::BITS as u64;
        let c = root_word_cell(bit / w);
        let off = (bit % w) as u32;
        let old = self.arena.load(c);
        let v = (old & !W::truncate(3).shl_mod(off)) | W::truncate(color.bits() as u64).shl_mod(off);
        self.arena.store(c, v);
        if color != Color::Black || Some(self.tree) != self.first.get() {
            return;
        }
        // Tree f turned black: (f,0) now lives at home, its value is moved
        // there by the caller right after this returns.
        let f = self.tree;
        let home_f = self.geo.tree_start(f);
        match first_nonblack(&*self.arena, self.geo.trees(), false) {
            Some(next) => {
                let home_next = self.geo.tree_start(next);
                for e in 0..HIST_CELLS {
                    let x = self.arena.load(lw_cell(home_next, e));
                    self.arena.store(lw_cell(0, HEADER + e), x);
                }
                if f != 0 {
                    for e in 0..LARGE {
                        let x = self.arena.load(lw_cell(home_f, e));
                        self.arena.store(lw_cell(home_next, e), x);
                    }
                }
                self.first.set(Some(next));
            }
            None => {
                if f != 0 {
                    for e in 0..LARGE {
                        let x = self.arena.load(lw_cell(home_f, e));
                        self.arena.store(lw_cell(0, e), x);
                    }
                }
                self.arena.store(0, W::zero());
                self.all_black.set(true);
            }
        }
    }
}

/// The self-contained clearable word array.
///
/// Needs `n + 1` cells in the all-black and few-roots representations and
/// `n + 3` plus the root-bit machinery of a forest otherwise.
#[derive(Debug)]
pub struct ClearableArray<W: Word> {
    arena: Arena<W>,
    /// The universe size as given, kept for `len()` only; operations read it
    /// from the arena.
    n: usize,
    t: u32,
    stats: CaseStats,
    init_probes: ProbeCounts,
}

impl<W: Word> ClearableArray<W> {
    pub fn new(n: usize, t: u32, fill: FillPolicy) -> Result<Self, ParamError> {
        let n64 = n as u64;
        if n == 0 {
            return Err(ParamError::EmptyUniverse);
        }
        if W::BITS < 64 && n64 >> W::BITS != 0 {
            return Err(ParamError::UniverseTooLarge { n: n64, w: W::BITS });
        }
        let geo = Geometry::new(n64, t, W::BITS)?;
        let cells = match geo.representation(W::BITS) {
            Representation::Forest => 3 + ForestLayout::new(3, n64, t, LARGE, W::BITS)?.cells(),
            _ => n + 1,
        };
        Self::with_arena(Arena::new(cells, fill), n, t)
    }

    /// Initializes inside `arena`, which must have at least the cells
    /// [`ClearableArray::new`] would allocate.
    pub fn with_arena(mut arena: Arena<W>, n: usize, t: u32) -> Result<Self, ParamError> {
        let n64 = n as u64;
        let geo = Geometry::new(n64, t, W::BITS)?;
        let t = geo.layout.t;
        let need = match geo.representation(W::BITS) {
            Representation::Forest => 3 + ForestLayout::new(3, n64, t, LARGE, W::BITS)?.cells(),
            _ => n + 1,
        };
        if arena.len() < need {
            return Err(ParamError::ArenaSize { got: arena.len(), need });
        }
        let before = arena.snapshot_counters();
        match geo.representation(W::BITS) {
            Representation::AllBlack => {
                for c in 1..=n {
                    arena.store(c, W::zero());
                }
                arena.store(0, W::zero());
            }
            Representation::FewRoots => {
                arena.store(0, W::one());
                arena.store(1, W::truncate(n64));
                arena.store(2, W::truncate(t as u64));
                for k in 0..4 {
                    arena.store(root_word_cell(k), W::zero());
                }
                for pos in geo.layout.leftover_start()..n64 {
                    arena.store(1 + pos as usize, W::zero());
                }
            }
            Representation::Forest => {
                let forest = ForestLayout::new(3, n64, t, LARGE, W::BITS)?;
                arena.store(0, W::one());
                arena.store(1, W::truncate(n64));
                arena.store(2, W::truncate(t as u64));
                forest.init(&mut arena);
            }
        }
        let init_probes = arena.snapshot_counters() - before;
        Ok(ClearableArray { arena, n, t, stats: CaseStats::default(), init_probes })
    }

    pub fn arena(&self) -> &Arena<W> {
        &self.arena
    }

    /// Probes spent by initialization.
    pub fn init_probes(&self) -> ProbeCounts {
        self.init_probes
    }

    /// The height actually used (`t` capped at `w`).
    pub fn t(&self) -> u32 {
        self.t
    }

    /// Reads the header: `None` when all black.
    fn header(&self, peek: bool) -> Option<Geometry> {
        let ld = |c: usize| if peek { self.arena.peek(c) } else { self.arena.load(c) };
        if ld(0) & W::one() == W::zero() {
            return None;
        }
        let n = ld(1).to_u64();
        let t = ld(2).to_u64() as u32;
        Some(Geometry::new(n, t, W::BITS).expect("header holds valid parameters"))
    }

    pub fn representation(&self) -> Representation {
        match self.header(true) {
            None => Representation::AllBlack,
            Some(g) => g.representation(W::BITS),
        }
    }

    fn forest(geo: &Geometry) -> ForestLayout {
        ForestLayout::new(3, geo.n, geo.layout.t, LARGE, W::BITS).expect("valid forest")
    }

    /// First positions of written large-word blocks (blocks of 22 entries),
    /// in increasing order. In the all-black representation every block
    /// counts as written; leftover entries past the last full block are
    /// never reported.
    pub fn iter_written_blocks(&self) -> (Vec<usize>, WalkStats) {
        let mut out = Vec::new();
        let stats = match self.header(false) {
            None => {
                let blocks = self.n / LARGE;
                out.extend((0..blocks).map(|b| b * LARGE));
                WalkStats { gray_nodes: 0, leaves: blocks as u64 }
            }
            Some(geo) => match geo.representation(W::BITS) {
                Representation::Forest => {
                    Self::forest(&geo).for_each_black_block::<W, LARGE>(&self.arena, &mut |p| out.push(p as usize))
                }
                _ => {
                    let first = Cell::new(first_nonblack(&self.arena, geo.trees(), false));
                    let done = Cell::new(false);
                    let mut total = WalkStats::default();
                    for i in 0..geo.trees() {
                        let view = FewRootsTree { arena: &self.arena, geo: &geo, tree: i, first: &first, all_black: &done, _w: std::marker::PhantomData };
                        let start = geo.tree_start(i);
                        let s = tree::for_each_black_leaf(&view, geo.shape(), geo.layout.tree_universe(i), &mut |k| {
                            out.push(((start + k) * LARGE as u64) as usize)
                        });
                        total.gray_nodes += s.gray_nodes;
                        total.leaves += s.leaves;
                    }
                    total
                }
            },
        };
        out.sort_unstable();
        (out, stats)
    }
}

impl<W: Word> InitializableArray<W> for ClearableArray<W> {
    fn name(&self) -> String {
        format!("clearable(t={})", self.t)
    }

    fn len(&self) -> usize {
        self.n
    }

    fn read(&self, index: usize) -> W {
        let pos = index as u64;
        let Some(geo) = self.header(false) else {
            return self.arena.load(1 + index);
        };
        match geo.representation(W::BITS) {
            Representation::Forest => Self::forest(&geo).read::<W, LARGE>(&self.arena, pos),
            _ => {
                if pos >= geo.layout.leftover_start() {
                    return self.arena.load(1 + index);
                }
                let (i, k) = geo.layout.split(pos / LARGE as u64);
                let first = Cell::new(first_nonblack(&self.arena, geo.trees(), false));
                let done = Cell::new(false);
                let view = FewRootsTree { arena: &self.arena, geo: &geo, tree: i, first: &first, all_black: &done, _w: std::marker::PhantomData };
                tree::read(&view, geo.shape(), k).cell(index % LARGE)
            }
        }
    }

    fn write(&mut self, index: usize, value: W) {
        let pos = index as u64;
        let Some(geo) = self.header(false) else {
            self.arena.store(1 + index, value);
            return;
        };
        match geo.representation(W::BITS) {
            Representation::Forest => {
                if let Some(r) = Self::forest(&geo).write::<W, LARGE>(&mut self.arena, pos, value) {
                    self.stats.record(r);
                }
            }
            _ => {
                if pos >= geo.layout.leftover_start() {
                    self.arena.store(1 + index, value);
                    return;
                }
                let (i, k) = geo.layout.split(pos / LARGE as u64);
                let sub = index % LARGE;
                let first = Cell::new(first_nonblack(&self.arena, geo.trees(), false));
                let done = Cell::new(false);
                let mut view = FewRootsTree {
                    arena: &mut self.arena,
                    geo: &geo,
                    tree: i,
                    first: &first,
                    all_black: &done,
                    _w: std::marker::PhantomData,
                };
                let r = tree::write(&mut view, geo.shape(), geo.layout.tree_universe(i), k, |mut old: Lw<W>| {
                    old.set_cell(sub, value);
                    old
                });
                self.stats.record(r);
            }
        }
    }

    fn space_bits(&self) -> u64 {
        let w = W::BITS as u64;
        match self.header(true) {
            None => self.n as u64 * w + 1,
            Some(geo) => match geo.representation(W::BITS) {
                Representation::Forest => 1 + 2 * w + Self::forest(&geo).space_bits(),
                _ => geo.n * w + 1,
            },
        }
    }

    fn probes(&self) -> ProbeCounts {
        self.arena.snapshot_counters()
    }

    fn validate(&self, shadow: &[Option<W>]) -> Result<(), Violation> {
        let Some(geo) = self.header(true) else {
            for (l, s) in shadow.iter().enumerate() {
                if self.arena.peek(1 + l) != s.unwrap_or(W::zero()) {
                    return Err(Violation::new("3", format!("all-black cell {l} differs from client value")));
                }
            }
            return Ok(());
        };
        if geo.n != self.n as u64 || geo.layout.t != self.t {
            return Err(Violation::new("header", format!("header holds n = {}, t = {}", geo.n, geo.layout.t)));
        }
        match geo.representation(W::BITS) {
            Representation::Forest => Self::forest(&geo).validate::<W, LARGE>(&self.arena, &|p| shadow[p as usize]),
            _ => {
                for pos in geo.layout.leftover_start()..geo.n {
                    if self.arena.peek(1 + pos as usize) != shadow[pos as usize].unwrap_or(W::zero()) {
                        return Err(Violation::new("leftover", format!("leftover cell {pos} differs")));
                    }
                }
                let first = Cell::new(first_nonblack(&self.arena, geo.trees(), true));
                if first.get().is_none() {
                    return Err(Violation::new("1", "discriminator set but every root is black"));
                }
                let done = Cell::new(false);
                for i in 0..geo.trees() {
                    let view = FewRootsTree { arena: &self.arena, geo: &geo, tree: i, first: &first, all_black: &done, _w: std::marker::PhantomData };
                    let start = geo.tree_start(i);
                    let block = |k: u64| -> Option<Lw<W>> {
                        let p0 = ((start + k) * LARGE as u64) as usize;
                        let mut any = false;
                        let mut lw = Lw::<W>::zero();
                        for e in 0..LARGE {
                            if let Some(x) = shadow[p0 + e] {
                                any = true;
                                lw.set_cell(e, x);
                            }
                        }
                        any.then_some(lw)
                    };
                    tree::validate(&view, geo.shape(), geo.layout.tree_universe(i), &block)
                        .map_err(|v| Violation::new(v.invariant, format!("tree {i}: {}", v.detail)))?;
                }
                Ok(())
            }
        }
    }

    fn case_stats(&self) -> Option<CaseStats> {
        Some(self.stats)
    }
}

/// Init writes predicted from `(n, t)` alone, per representation.
pub fn predicted_init_writes(n: u64, t: u32, w: u32) -> u64 {
    let geo = Geometry::new(n, t, w).expect("valid parameters");
    match geo.representation(w) {
        Representation::AllBlack => n + 1,
        Representation::FewRoots => 3 + 4 + (n - geo.layout.leftover_start()),
        Representation::Forest => {
            let f = ForestLayout::new(3, n, t, LARGE, w).expect("valid forest");
            let partial = match f.roots {
                crate::lightpath::forest::RootBits::Packed { words, full, .. } => (words > full) as u64,
                _ => unreachable!(),
            };
            3 + 1 + partial + (n - f.leftover_start())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_values() {
        assert_eq!(redundancy_bound(1 << 20, 2, 64), 256);
        assert_eq!(redundancy_bound(1 << 20, 20, 64), 1);
        assert_eq!(redundancy_bound(1 << 20, 1, 64), 8192);
    }

    #[test]
    fn representation_choice() {
        assert_eq!(Geometry::new(10, 2, 64).unwrap().representation(64), Representation::AllBlack);
        assert_eq!(Geometry::new(1 << 10, 2, 64).unwrap().representation(64), Representation::FewRoots);
        assert_eq!(Geometry::new(1 << 22, 1, 64).unwrap().representation(64), Representation::Forest);
    }
}
