//! Arbitrary universe sizes: a forest of partial light-path trees whose
//! leaves are large words of `C` cells.
//!
//! For a height `t` (capped at `w`), the degree `d` is the largest power of
//! two not above `8w/t`, so a history takes `2dt <= 16w` bits and fits a
//! large word of `C >= 16` cells. The `L = ⌊n/C⌋` large words are cut into
//! `N` trees of `d^t` leaves each (the last one partial). The `n mod C`
//! leftover cells are plain words, zeroed at initialization.
//!
//! Root colors: with one tree, a single bit says "black", and a white root
//! is told from a gray one by its history word, which is zero exactly when
//! white. With more trees, the `2N` root bits are packed into words, the
//! full ones certified by a [`Certifier`], the partial one cleared at
//! initialization.

use std::marker::PhantomData;
use std::ops::{Deref, DerefMut};

use super::history::{HistWord, LargeWord};
use super::tree::{self, CaseStats, Color, TreeMemory, TreeShape, TreeView, WalkStats, WriteReport};
use crate::arena::{Arena, FillPolicy, ProbeCounts};
use crate::certify::Certifier;
use crate::contract::{InitializableArray, ParamError, Violation};
use crate::word::{ceil_log2, Word};

/// Where the root colors of a forest live.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootBits {
    /// No trees: every position is a leftover cell.
    None,
    /// One tree; bit 0 of `cell` is the black flag.
    Single { cell: usize },
    /// `2N` packed bits in `words` words at `data`; the first `full` are
    /// certified, the rest (at most one) is cleared at initialization.
    Packed { data: usize, words: u64, full: u64, cert: Certifier },
}

/// Placement of a forest inside an arena, computed from `(n, t)` alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForestLayout {
    pub base: usize,
    pub n: u64,
    pub t: u32,
    pub shape: TreeShape,
    pub c: u64,
    pub large: u64,
    pub trees: u64,
    pub roots: RootBits,
    w: u32,
}

/// Largest power of two `d` with `d <= 8w/t`, after capping `t` at `w`.
pub fn forest_degree(w: u32, t: u32) -> (u64, u32) {
    let t = t.min(w);
    let q = 8 * w as u64 / t as u64;
    (1 << (63 - q.leading_zeros()), t)
}

impl ForestLayout {
    pub fn new(base: usize, n: u64, t: u32, c: usize, w: u32) -> Result<Self, ParamError> {
        if n == 0 {
            return Err(ParamError::EmptyUniverse);
        }
        if t == 0 {
            return Err(ParamError::Zero { name: "t" });
        }
        let (d, t) = forest_degree(w, t);
        let shape = TreeShape::new(d, t, c as u32 * w)?;
        let c = c as u64;
        let large = n / c;
        let trees = match (large, shape.leaves()) {
            (0, _) => 0,
            (l, Some(cap)) => l.div_ceil(cap),
            (_, None) => 1,
        };
        let end = base + n as usize;
        let roots = match trees {
            0 => RootBits::None,
            1 => RootBits::Single { cell: end },
            k => {
                let bits = 2 * k;
                let words = bits.div_ceil(w as u64);
                let full = bits / w as u64;
                if w < 64 && full >> w != 0 {
                    return Err(ParamError::UniverseTooLarge { n, w });
                }
                RootBits::Packed { data: end, words, full, cert: Certifier::at(end + words as usize, full) }
            }
        };
        Ok(ForestLayout { base, n, t, shape, c, large, trees, roots, w })
    }

    /// Cells used, from `base` on.
    pub fn cells(&self) -> usize {
        self.n as usize
            + match self.roots {
                RootBits::None => 0,
                RootBits::Single { .. } => 1,
                RootBits::Packed { words, full, .. } => words as usize + Certifier::cells(full),
            }
    }

    /// Bits charged: `n` words plus the root-bit machinery.
    pub fn space_bits(&self) -> u64 {
        let w = self.w as u64;
        self.n * w
            + match self.roots {
                RootBits::None => 0,
                RootBits::Single { .. } => 1,
                RootBits::Packed { words, full, .. } => words * w + 2 * full * w + ceil_log2(full + 1) as u64,
            }
    }

    pub fn leftover_start(&self) -> u64 {
        self.large * self.c
    }

    /// Universe size (in large words) of tree `i`.
    pub fn tree_universe(&self, i: u64) -> u64 {
        match self.shape.leaves() {
            Some(cap) if i + 1 < self.trees => cap,
            Some(cap) => self.large - i * cap,
            None => self.large,
        }
    }

    /// Tree and leaf holding large word `g`.
    #[inline]
    pub fn split(&self, g: u64) -> (u64, u64) {
        let s = self.shape.leaves_log();
        if s >= 64 {
            (0, g)
        } else {
            (g >> s, g & ((1 << s) - 1))
        }
    }

    #[inline]
    fn tree_base(&self, i: u64) -> usize {
        if i == 0 {
            self.base
        } else {
            self.base + ((i << self.shape.leaves_log()) * self.c) as usize
        }
    }

    /// Clears the leftover cells and sets every root white.
    pub fn init<W: Word>(&self, arena: &mut Arena<W>) {
        for cell in self.base + self.leftover_start() as usize..self.base + self.n as usize {
            arena.store(cell, W::zero());
        }
        match self.roots {
            RootBits::None => {}
            RootBits::Single { cell } => {
                arena.store(cell, W::zero());
                for k in 0..self.c as usize {
                    arena.store(self.base + k, W::zero());
                }
            }
            RootBits::Packed { data, words, full, cert } => {
                cert.init(arena);
                if words > full {
                    arena.store(data + full as usize, W::zero());
                }
            }
        }
    }

    pub fn read<W: Word, const C: usize>(&self, arena: &Arena<W>, pos: u64) -> W {
        debug_assert_eq!(C as u64, self.c);
        if pos >= self.leftover_start() {
            return arena.load(self.base + pos as usize);
        }
        let (i, leaf) = self.split(pos / self.c);
        let mem = ForestTree::<W, _, C>::new(arena, self, i);
        tree::read(&mem, &self.shape, leaf).cell((pos % self.c) as usize)
    }

    pub fn write<W: Word, const C: usize>(&self, arena: &mut Arena<W>, pos: u64, x: W) -> Option<WriteReport> {
        debug_assert_eq!(C as u64, self.c);
        if pos >= self.leftover_start() {
            arena.store(self.base + pos as usize, x);
            return None;
        }
        let (i, leaf) = self.split(pos / self.c);
        let sub = (pos % self.c) as usize;
        let m = self.tree_universe(i);
        let mut mem = ForestTree::<W, _, C>::new(arena, self, i);
        Some(tree::write(&mut mem, &self.shape, m, leaf, |mut old: LargeWord<W, C>| {
            old.set_cell(sub, x);
            old
        }))
    }

    /// Calls `visit` with the first position of every written large word, in
    /// increasing order, and returns the walk statistics summed over trees.
    /// Calls `visit` with the first position of every black leaf block.
    ///
    /// Only trees with a nonwhite root are walked: with packed root bits the
    /// candidates come from the certified words, found through the
    /// certifier's code table, plus the uncertified tail word.
    pub fn for_each_black_block<W: Word, const C: usize>(
        &self,
        arena: &Arena<W>,
        visit: &mut dyn FnMut(u64),
    ) -> WalkStats {
        let mut total = WalkStats::default();
        let mut walk = |i: u64, total: &mut WalkStats| {
            let mem = ForestTree::<W, _, C>::new(arena, self, i);
            let first = if i == 0 { 0 } else { i << self.shape.leaves_log() };
            let s = tree::for_each_black_leaf(&mem, &self.shape, self.tree_universe(i), &mut |leaf| {
                visit((first + leaf) * self.c)
            });
            total.gray_nodes += s.gray_nodes;
            total.leaves += s.leaves;
        };
        match self.roots {
            RootBits::None => {}
            RootBits::Single { .. } => walk(0, &mut total),
            RootBits::Packed { data, words, full, cert } => {
                let w = self.w as u64;
                let codes = cert.peek_counter(arena);
                let tail = (words > full).then_some(full);
                for k in (0..codes).map(|j| cert.peek_code_owner(arena, j)).chain(tail) {
                    let word = arena.peek(data + k as usize);
                    let mut nonwhite = (word | word.shr_trunc(1)) & crate::word::alt_mask::<W>(self.w / 2);
                    while !nonwhite.is_zero() {
                        let b = crate::word::lsb(nonwhite);
                        nonwhite = nonwhite & !W::one().shl_mod(b);
                        let i = (k * w + b as u64) / 2;
                        if i < self.trees {
                            walk(i, &mut total);
                        }
                    }
                }
            }
        }
        total
    }

    pub fn validate<W: Word, const C: usize>(
        &self,
        arena: &Arena<W>,
        shadow: &dyn Fn(u64) -> Option<W>,
    ) -> Result<(), Violation> {
        for pos in self.leftover_start()..self.n {
            let want = shadow(pos).unwrap_or(W::zero());
            if arena.peek(self.base + pos as usize) != want {
                return Err(Violation::new("leftover", format!("leftover cell {pos} differs from client value")));
            }
        }
        for i in 0..self.trees {
            let mem = ForestTree::<W, _, C>::new(arena, self, i);
            let first = if i == 0 { 0 } else { i << self.shape.leaves_log() };
            let block = |leaf: u64| -> Option<LargeWord<W, C>> {
                let p0 = (first + leaf) * self.c;
                let mut any = false;
                let mut lw = LargeWord::<W, C>::zero();
                for k in 0..C {
                    if let Some(x) = shadow(p0 + k as u64) {
                        any = true;
                        lw.set_cell(k, x);
                    }
                }
                any.then_some(lw)
            };
            tree::validate(&mem, &self.shape, self.tree_universe(i), &block)
                .map_err(|v| Violation::new(v.invariant, format!("tree {i}: {}", v.detail)))?;
        }
        Ok(())
    }
}

/// One tree of a forest, seen through the tree-memory interface.
pub(crate) struct ForestTree<'a, W: Word, A, const C: usize> {
    arena: A,
    layout: &'a ForestLayout,
    tree: u64,
    base: usize,
    _w: PhantomData<W>,
}

impl<'a, W: Word, A: Deref<Target = Arena<W>>, const C: usize> ForestTree<'a, W, A, C> {
    fn new(arena: A, layout: &'a ForestLayout, tree: u64) -> Self {
        ForestTree { arena, layout, tree, base: layout.tree_base(tree), _w: PhantomData }
    }

    fn root_word(&self, peek: bool) -> (u64, u32, W) {
        let RootBits::Packed { data, full, cert, .. } = self.layout.roots else { unreachable!() };
        let bit = 2 * self.tree;
        let (k, off) = (bit / self.layout.w as u64, (bit % self.layout.w as u64) as u32);
        let valid = k >= full || if peek { cert.peek_certified(&*self.arena, k) } else { cert.is_certified(&*self.arena, k) };
        let word = match (valid, peek) {
            (false, _) => W::zero(),
            (true, false) => self.arena.load(data + k as usize),
            (true, true) => self.arena.peek(data + k as usize),
        };
        (k, off, word)
    }

    fn color(&self, peek: bool) -> Color {
        match self.layout.roots {
            RootBits::None => unreachable!("forest without trees"),
            RootBits::Single { cell } => {
                let flag = if peek { self.arena.peek(cell) } else { self.arena.load(cell) };
                if flag & W::one() == W::one() {
                    return Color::Black;
                }
                let h = if peek { self.peek(0) } else { self.load(0) };
                let shape = &self.layout.shape;
                let nav = h.shr(shape.slot(shape.t)).and(LargeWord::ones(shape.nav_bits()));
                if nav.is_zero() {
                    Color::White
                } else {
                    Color::Gray
                }
            }
            RootBits::Packed { .. } => {
                let (_, off, word) = self.root_word(peek);
                Color::from_bits((word.shr_trunc(off).to_u64() & 3) as u8)
            }
        }
    }
}

impl<W: Word, A: Deref<Target = Arena<W>>, const C: usize> TreeView for ForestTree<'_, W, A, C> {
    type Value = LargeWord<W, C>;

    #[inline]
    fn load(&self, leaf: u64) -> LargeWord<W, C> {
        let cell = self.base + leaf as usize * C;
        LargeWord(std::array::from_fn(|k| self.arena.load(cell + k)))
    }

    fn peek(&self, leaf: u64) -> LargeWord<W, C> {
        let cell = self.base + leaf as usize * C;
        LargeWord(std::array::from_fn(|k| self.arena.peek(cell + k)))
    }

    fn root_color(&self) -> Color {
        self.color(false)
    }

    fn peek_root_color(&self) -> Color {
        self.color(true)
    }
}

impl<W: Word, A: DerefMut<Target = Arena<W>>, const C: usize> TreeMemory for ForestTree<'_, W, A, C> {
    #[inline]
    fn store(&mut self, leaf: u64, value: LargeWord<W, C>) {
        let cell = self.base + leaf as usize * C;
        for (k, x) in value.0.into_iter().enumerate() {
            self.arena.store(cell + k, x);
        }
    }

    fn set_root_color(&mut self, color: Color) {
        match self.layout.roots {
            RootBits::None => unreachable!("forest without trees"),
            RootBits::Single { cell } => match color {
                Color::Black => self.arena.store(cell, W::one()),
                // Gray is implied by the nonzero history just stored in A[0].
                Color::Gray => {}
                Color::White => unreachable!("roots only darken"),
            },
            RootBits::Packed { data, full, cert, .. } => {
                let (k, off, word) = self.root_word(false);
                if k < full && !cert.is_certified(&*self.arena, k) {
                    cert.certify(&mut *self.arena, k);
                }
                let three = W::truncate(3).shl_mod(off);
                let v = (word & !three) | W::truncate(color.bits() as u64).shl_mod(off);
                self.arena.store(data + k as usize, v);
            }
        }
    }
}

/// Standalone forest over its own arena; `n` and `t` are kept by the caller
/// side of the interface (here: this struct).
#[derive(Debug)]
pub struct ForestArray<W: Word, const C: usize> {
    arena: Arena<W>,
    layout: ForestLayout,
    stats: CaseStats,
}

/// Forest with large words of 16 cells.
pub type Forest<W> = ForestArray<W, 16>;

impl<W: Word, const C: usize> ForestArray<W, C> {
    pub fn new(n: usize, t: u32, fill: FillPolicy) -> Result<Self, ParamError> {
        let layout = ForestLayout::new(0, n as u64, t, C, W::BITS)?;
        let mut arena = Arena::new(layout.cells(), fill);
        layout.init(&mut arena);
        Ok(ForestArray { arena, layout, stats: CaseStats::default() })
    }

    pub fn layout(&self) -> &ForestLayout {
        &self.layout
    }

    pub fn arena(&self) -> &Arena<W> {
        &self.arena
    }

    /// First positions of written large-word blocks, in increasing order.
    /// Leftover cells are not covered.
    pub fn iter_written_blocks(&self) -> (Vec<usize>, WalkStats) {
        let mut out = Vec::new();
        let s = self.layout.for_each_black_block::<W, C>(&self.arena, &mut |p| out.push(p as usize));
        out.sort_unstable();
        (out, s)
    }
}

impl<W: Word, const C: usize> InitializableArray<W> for ForestArray<W, C> {
    fn name(&self) -> String {
        format!("forest(t={},c={})", self.layout.t, C)
    }

    fn len(&self) -> usize {
        self.layout.n as usize
    }

    fn read(&self, index: usize) -> W {
        self.layout.read::<W, C>(&self.arena, index as u64)
    }

    fn write(&mut self, index: usize, value: W) {
        if let Some(r) = self.layout.write::<W, C>(&mut self.arena, index as u64, value) {
            self.stats.record(r);
        }
    }

    fn space_bits(&self) -> u64 {
        self.layout.space_bits()
    }

    fn probes(&self) -> ProbeCounts {
        self.arena.snapshot_counters()
    }

    fn validate(&self, shadow: &[Option<W>]) -> Result<(), Violation> {
        self.layout.validate::<W, C>(&self.arena, &|p| shadow[p as usize])
    }

    fn case_stats(&self) -> Option<CaseStats> {
        Some(self.stats)
    }
}
