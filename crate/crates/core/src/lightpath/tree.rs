//! The colored complete `d`-ary tree with light paths.
//!
//! Leaves are white (never written) or black (written); inner nodes are
//! white, black, or gray when mixed. Only the root color is stored
//! explicitly. Every other color is recovered from *histories*: the
//! concatenated navigation vectors of a light path, kept in the word of the
//! path's historian (the leftmost leaf below the path's top node). When the
//! historian is black, its own value lives in the path's proxy (the white
//! leaf ending the path).
//!
//! The functions here are generic over [`TreeMemory`], which supplies the
//! word array `A` and the root color. The tree shape `(d, t)` is passed in
//! by the caller and never stored.

use serde::{Deserialize, Serialize};

use super::history::HistWord;
use crate::contract::{ParamError, Violation};

/// Color of a tree node, in its two-bit encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Color {
    White = 0b00,
    Gray = 0b01,
    Black = 0b10,
}

impl Color {
    #[inline]
    pub fn from_bits(b: u8) -> Color {
        match b & 3 {
            0 => Color::White,
            1 => Color::Gray,
            2 => Color::Black,
            _ => {
                debug_assert!(false, "color pattern 11");
                Color::Black
            }
        }
    }

    #[inline]
    pub fn bits(self) -> u8 {
        self as u8
    }
}

/// Shape of a complete tree: degree `d = 2^log_d` and height `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeShape {
    pub log_d: u32,
    pub t: u32,
}

#[inline]
fn shr_sat(x: u64, s: u32) -> u64 {
    x.checked_shr(s).unwrap_or(0)
}

#[inline]
fn shl_exact(x: u64, s: u32) -> u64 {
    if x == 0 {
        return 0;
    }
    debug_assert!(s < 64 && x.leading_zeros() >= s, "leaf index overflow");
    x << s
}

impl TreeShape {
    /// Checks `d` is a power of two `>= 2`, `t >= 1` and `2 d t <= hist_bits`.
    pub fn new(d: u64, t: u32, hist_bits: u32) -> Result<Self, ParamError> {
        if d < 2 || !d.is_power_of_two() {
            return Err(ParamError::DegreeNotPowerOfTwo { d });
        }
        if t == 0 {
            return Err(ParamError::Zero { name: "t" });
        }
        let need = 2 * d * t as u64;
        if need > hist_bits as u64 {
            return Err(ParamError::HistoryTooWide { need, avail: hist_bits as u64 });
        }
        Ok(TreeShape { log_d: d.trailing_zeros(), t })
    }

    #[inline]
    pub fn d(&self) -> u64 {
        1 << self.log_d
    }

    #[inline]
    pub fn nav_bits(&self) -> u32 {
        2 << self.log_d
    }

    /// Bit offset of the navigation vector of a height-`j` node in a history.
    #[inline]
    pub fn slot(&self, j: u32) -> u32 {
        self.nav_bits() * (j - 1)
    }

    /// `log₂ d^t`, the number of leaves as a power of two.
    #[inline]
    pub fn leaves_log(&self) -> u32 {
        self.log_d * self.t
    }

    /// `d^t`, or `None` when it does not fit in 64 bits.
    pub fn leaves(&self) -> Option<u64> {
        1u64.checked_shl(self.leaves_log())
    }

    /// Whether a universe of `m` leaves leaves part of the tree unused.
    #[inline]
    pub fn is_partial(&self, m: u64) -> bool {
        self.leaves().is_none_or(|cap| m < cap)
    }

    #[inline]
    pub fn child_index(&self, leaf: u64, j: u32) -> u32 {
        (shr_sat(leaf, self.log_d * (j - 1)) & (self.d() - 1)) as u32
    }

    #[inline]
    pub fn leftmost(&self, j: u32, rank: u64) -> u64 {
        shl_exact(rank, self.log_d * j)
    }

    /// Number of height-`j` nodes with at least one of the first `m` leaves below.
    pub fn nodes_at(&self, j: u32, m: u64) -> u64 {
        if m == 0 {
            0
        } else {
            shr_sat(m - 1, self.log_d * j) + 1
        }
    }
}

/// A node `(height, rank)`: height 0 are leaves, rank counts nodes of the
/// same height from the left starting at 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NodeRef {
    pub height: u32,
    pub rank: u64,
}

impl NodeRef {
    pub fn root(shape: &TreeShape) -> Self {
        NodeRef { height: shape.t, rank: 0 }
    }

    pub fn parent(&self, shape: &TreeShape) -> Self {
        NodeRef { height: self.height + 1, rank: self.rank >> shape.log_d }
    }

    pub fn child(&self, shape: &TreeShape, i: u32) -> Self {
        NodeRef { height: self.height - 1, rank: (self.rank << shape.log_d) + i as u64 }
    }

    pub fn leftmost_leaf(&self, shape: &TreeShape) -> u64 {
        shape.leftmost(self.height, self.rank)
    }

    /// The child of `self` that is an ancestor of `leaf`.
    pub fn via_child(&self, shape: &TreeShape, leaf: u64) -> Self {
        NodeRef { height: self.height - 1, rank: shr_sat(leaf, shape.log_d * (self.height - 1)) }
    }

    /// Position among its siblings.
    pub fn index(&self, shape: &TreeShape) -> u32 {
        (self.rank & (shape.d() - 1)) as u32
    }
}

/// Read access to the word array `A` and root bits of one tree.
pub trait TreeView {
    type Value: HistWord;

    fn load(&self, leaf: u64) -> Self::Value;

    /// Uncounted load, for validation.
    fn peek(&self, leaf: u64) -> Self::Value;

    fn root_color(&self) -> Color;

    fn peek_root_color(&self) -> Color;
}

/// Read and write access to the word array `A` and root bits of one tree.
pub trait TreeMemory: TreeView {
    fn store(&mut self, leaf: u64, value: Self::Value);

    fn set_root_color(&mut self, color: Color);

    #[doc(hidden)]
    fn skip_case5_move(&self) -> bool {
        false
    }
}

/// The update scenario taken by the first phase of a write.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    AlreadyBlack,
    RootWhiteToGray,
    RootGrayToBlack,
    /// `v` becomes the preferred child of its parent.
    Case1,
    /// `v` stops being the preferred child of its parent.
    Case2,
    /// `v` is a leaf with a white left sibling.
    Case3,
    /// `v` becomes a top node.
    Case4,
    /// `v` was a top node and turns black.
    Case5,
}

/// How often each update scenario occurred.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseStats {
    pub already_black: u64,
    pub root_white_to_gray: u64,
    pub root_gray_to_black: u64,
    pub cases: [u64; 5],
    pub materialized: u64,
}

impl CaseStats {
    pub fn record(&mut self, report: WriteReport) {
        match report.case {
            Case::AlreadyBlack => self.already_black += 1,
            Case::RootWhiteToGray => self.root_white_to_gray += 1,
            Case::RootGrayToBlack => self.root_gray_to_black += 1,
            Case::Case1 => self.cases[0] += 1,
            Case::Case2 => self.cases[1] += 1,
            Case::Case3 => self.cases[2] += 1,
            Case::Case4 => self.cases[3] += 1,
            Case::Case5 => self.cases[4] += 1,
        }
        if report.materialized {
            self.materialized += 1;
        }
    }

    pub fn merge(&mut self, o: &CaseStats) {
        self.already_black += o.already_black;
        self.root_white_to_gray += o.root_white_to_gray;
        self.root_gray_to_black += o.root_gray_to_black;
        for (a, b) in self.cases.iter_mut().zip(o.cases) {
            *a += b;
        }
        self.materialized += o.materialized;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WriteReport {
    pub case: Case,
    pub materialized: bool,
}

// navigation vectors

#[inline]
fn nav_of<H: HistWord>(shape: &TreeShape, hist: H, j: u32) -> H {
    hist.shr(shape.slot(j)).and(H::ones(shape.nav_bits()))
}

#[inline]
fn put_nav<H: HistWord>(shape: &TreeShape, hist: H, j: u32, nav: H) -> H {
    let slot = shape.slot(j);
    hist.and(H::ones(shape.nav_bits()).shl(slot).not()).or(nav.shl(slot))
}

#[inline]
fn color_at<H: HistWord>(nav: H, i: u32) -> Color {
    Color::from_bits(nav.pair(2 * i))
}

#[inline]
fn with_color<H: HistWord>(nav: H, i: u32, c: Color) -> H {
    nav.with_pair(2 * i, c.bits())
}

/// Leftmost gray child, else leftmost white child; `None` if all are black.
#[inline]
pub fn preferred_child<H: HistWord>(shape: &TreeShape, nav: H) -> Option<u32> {
    let alt = H::alt(shape.d() as u32);
    let gray = nav.and(alt);
    if let Some(b) = gray.lsb() {
        return Some(b / 2);
    }
    let white = nav.or(nav.shr(1)).not().and(alt);
    white.lsb().map(|b| b / 2)
}

#[inline]
fn has_nonblack_sibling<H: HistWord>(shape: &TreeShape, nav: H, i: u32) -> bool {
    let nonblack = nav.shr(1).not().and(H::alt(shape.d() as u32));
    !nonblack.with_pair(2 * i, 0).is_zero()
}

/// End of the light path through `(j, rank)`, following the navigation
/// vectors in `hist`.
fn follow<H: HistWord>(shape: &TreeShape, hist: H, mut j: u32, mut rank: u64) -> u64 {
    while j > 0 {
        let i = preferred_child(shape, nav_of(shape, hist, j)).expect("light path through a black node");
        rank = (rank << shape.log_d) + i as u64;
        j -= 1;
    }
    rank
}

/// Color of the leftmost leaf below the top node at height `j` of the path
/// whose history is `hist`.
fn leftmost_leaf_color<H: HistWord>(shape: &TreeShape, hist: H, mut j: u32) -> Color {
    loop {
        match color_at(nav_of(shape, hist, j), 0) {
            Color::Gray => j -= 1,
            c => return c,
        }
    }
}

/// Navigation vectors of heights `1..=j` along the path to `leaf` inside a
/// subtree that was white and now has `leaf` as its only black leaf.
fn fresh_subtree_history<H: HistWord>(shape: &TreeShape, j: u32, leaf: u64) -> H {
    let mut hist = H::zero();
    for h in 1..=j {
        let c = if h == 1 { Color::Black } else { Color::Gray };
        let nav = with_color(H::zero(), shape.child_index(leaf, h), c);
        hist = put_nav(shape, hist, h, nav);
    }
    hist
}

/// Leaf whose word holds the value of `leaf`, or `None` if `leaf` is white.
pub fn locate<M: TreeView>(mem: &M, shape: &TreeShape, leaf: u64) -> Option<u64> {
    match mem.root_color() {
        Color::White => return None,
        Color::Black => return Some(leaf),
        Color::Gray => {}
    }
    let mut node = NodeRef::root(shape);
    let mut hist = <M::Value as HistWord>::zero();
    let mut historian = 0;
    let mut is_top = true;
    loop {
        if is_top {
            historian = node.leftmost_leaf(shape);
            hist = mem.load(historian);
        }
        let nav = nav_of(shape, hist, node.height);
        let i = shape.child_index(leaf, node.height);
        match color_at(nav, i) {
            Color::White => return None,
            Color::Black if leaf != historian => return Some(leaf),
            // A black historian: its value sits at the end of the light path
            // through the last gray node, which is `node`. `hist` is that
            // path's history since no top node was passed after loading it.
            Color::Black => return Some(follow(shape, hist, node.height, node.rank)),
            Color::Gray => {
                is_top = preferred_child(shape, nav) != Some(i);
                node = node.child(shape, i);
            }
        }
    }
}

pub fn read<M: TreeView>(mem: &M, shape: &TreeShape, leaf: u64) -> M::Value {
    match locate(mem, shape, leaf) {
        Some(i) => mem.load(i),
        None => <M::Value as HistWord>::zero(),
    }
}

/// Turns a white root gray with the artificial history in which leaves
/// `m..d^t` are black, so that no proxy ever lands at or beyond `m`.
pub fn materialize<M: TreeMemory>(mem: &mut M, shape: &TreeShape, m: u64) {
    debug_assert!(m >= 1 && shape.is_partial(m));
    let d = shape.d() as u32;
    let mut hist = <M::Value as HistWord>::zero();
    let mut node = NodeRef::root(shape);
    loop {
        let off = m - node.leftmost_leaf(shape);
        let sh = shape.log_d * (node.height - 1);
        let boundary = shr_sat(off, sh) as u32;
        let below = if sh >= 64 { u64::MAX } else { (1u64 << sh) - 1 };
        let straddles = off & below != 0;
        let first_black = if straddles { boundary + 1 } else { boundary };
        let blacks = <M::Value as HistWord>::alt(d).shl(1);
        let nav_mask = <M::Value as HistWord>::ones(shape.nav_bits());
        let mut nav = blacks.and(nav_mask).and(nav_mask.shl(2 * first_black));
        if straddles {
            nav = with_color(nav, boundary, Color::Gray);
        }
        hist = put_nav(shape, hist, node.height, nav);
        if !straddles {
            break;
        }
        node = node.child(shape, boundary);
    }
    mem.store(0, hist);
    mem.set_root_color(Color::Gray);
}

struct Step<H> {
    node: NodeRef,
    color: Color,
    nav: H,
    top: usize,
}

struct Top<H> {
    node: NodeRef,
    historian: u64,
    hist: H,
}

/// Writes `update(old)` to `leaf`, where `old` is the current client value.
///
/// `universe` is the number of real leaves; when it is below `d^t` the first
/// write materializes the artificial history.
pub fn write<M: TreeMemory>(
    mem: &mut M,
    shape: &TreeShape,
    universe: u64,
    leaf: u64,
    update: impl FnOnce(M::Value) -> M::Value,
) -> WriteReport {
    let mut root = mem.root_color();
    let mut materialized = false;
    if root == Color::White && shape.is_partial(universe) {
        materialize(mem, shape, universe);
        root = Color::Gray;
        materialized = true;
    }
    let case = blacken(mem, shape, leaf, root);
    let dest = locate(mem, shape, leaf).expect("leaf is black after the first phase");
    let old = if case == Case::AlreadyBlack {
        mem.load(dest)
    } else {
        <M::Value as HistWord>::zero()
    };
    mem.store(dest, update(old));
    WriteReport { case, materialized }
}

/// First phase of a write: makes `leaf` black, keeping every other client
/// value unchanged.
fn blacken<M: TreeMemory>(mem: &mut M, shape: &TreeShape, leaf: u64, root: Color) -> Case {
    match root {
        Color::Black => return Case::AlreadyBlack,
        Color::White => {
            let hist = fresh_subtree_history(shape, shape.t, leaf);
            mem.store(0, hist);
            mem.set_root_color(Color::Gray);
            return Case::RootWhiteToGray;
        }
        Color::Gray => {}
    }

    let mut steps: Vec<Step<M::Value>> = Vec::with_capacity(shape.t as usize + 1);
    let mut tops: Vec<Top<M::Value>> = Vec::with_capacity(shape.t as usize);
    let mut node = NodeRef::root(shape);
    let mut color = Color::Gray;
    let mut is_top = true;
    loop {
        if color != Color::Gray {
            steps.push(Step { node, color, nav: HistWord::zero(), top: usize::MAX });
            break;
        }
        if is_top {
            let historian = node.leftmost_leaf(shape);
            tops.push(Top { node, historian, hist: mem.load(historian) });
        }
        let top = tops.len() - 1;
        let nav = nav_of(shape, tops[top].hist, node.height);
        let i = shape.child_index(leaf, node.height);
        steps.push(Step { node, color, nav, top });
        color = color_at(nav, i);
        is_top = color == Color::Gray && preferred_child(shape, nav) != Some(i);
        node = node.child(shape, i);
    }

    let last = steps.last().unwrap();
    if last.color == Color::Black {
        return Case::AlreadyBlack;
    }

    // v: the highest node on the path that changes color.
    let (sv, v_new) = if last.node.height > 0 {
        (steps.len() - 1, Color::Gray)
    } else {
        let deepest = (1..steps.len())
            .rev()
            .find(|&s| has_nonblack_sibling(shape, steps[s - 1].nav, steps[s].node.index(shape)))
            .unwrap_or(0);
        (deepest, Color::Black)
    };

    if sv == 0 {
        // The root turns black and was a top node whose proxy is `leaf`.
        mem.set_root_color(Color::Black);
        if leaf != 0 {
            let x = mem.load(leaf);
            mem.store(0, x);
        }
        return Case::RootGrayToBlack;
    }

    let v = steps[sv].node;
    let z = &steps[sv - 1];
    let jv = v.height;
    let iv = v.index(shape);
    let nav_z_new = with_color(z.nav, iv, v_new);
    let u = &tops[z.top];
    let (hu, hist_u_old) = (u.historian, u.hist);
    let p_u = follow(shape, hist_u_old, u.node.height, u.node.rank);
    let hu_black = leftmost_leaf_color(shape, hist_u_old, u.node.height) == Color::Black;
    let pref_old = preferred_child(shape, z.nav);
    let pref_new = preferred_child(shape, nav_z_new);

    // History slots of heights 1..=jv, i.e. below z.
    let low = <M::Value as HistWord>::ones(shape.nav_bits() * jv);
    let above = put_nav(shape, hist_u_old.and(low.not()), jv + 1, nav_z_new);

    if pref_new == Some(iv) {
        // Case 1: v turns gray and becomes the preferred child of z.
        let hist_u_new = above.or(fresh_subtree_history(shape, jv, leaf));
        let p_new = follow(shape, hist_u_new, u.node.height, u.node.rank);
        mem.store(hu, hist_u_new);
        if hu_black && p_new != p_u {
            let x = mem.load(p_u);
            mem.store(p_new, x);
        }
        let star = pref_old.expect("gray node without preferred child");
        if color_at(z.nav, star) == Color::Gray {
            // The old preferred child becomes a top node ending at p_u.
            let h_star = z.node.child(shape, star).leftmost_leaf(shape);
            if p_u != h_star {
                let x = mem.load(h_star);
                mem.store(p_u, x);
            }
            mem.store(h_star, hist_u_old.and(low));
        }
        Case::Case1
    } else if pref_old == Some(iv) {
        // Case 2: v turns black and stops being preferred.
        let star = pref_new.expect("gray node without preferred child");
        let h_star = z.node.child(shape, star).leftmost_leaf(shape);
        let star_gray = color_at(nav_z_new, star) == Color::Gray;
        let (sub, h_star_black) = if star_gray {
            let hs = mem.load(h_star);
            (hs.and(low), leftmost_leaf_color(shape, hs, jv) == Color::Black)
        } else {
            (HistWord::zero(), false)
        };
        let hist_u_new = above.or(sub);
        let p_new = follow(shape, hist_u_new, u.node.height, u.node.rank);
        mem.store(hu, hist_u_new);
        if h_star_black {
            let x = mem.load(p_new);
            mem.store(h_star, x);
        }
        if hu_black && p_new != p_u {
            let x = mem.load(p_u);
            mem.store(p_new, x);
        }
        Case::Case2
    } else {
        mem.store(hu, above.or(hist_u_old.and(low)));
        if v_new == Color::Gray {
            // Case 4: v becomes a top node; nothing was stored below it.
            let hist_v: M::Value = fresh_subtree_history(shape, jv, leaf);
            mem.store(v.leftmost_leaf(shape), hist_v);
            Case::Case4
        } else if jv == 0 {
            Case::Case3
        } else {
            // Case 5: v was a top node with proxy `leaf` and turns black.
            let hv = v.leftmost_leaf(shape);
            if hv != leaf && !mem.skip_case5_move() {
                let x = mem.load(leaf);
                mem.store(hv, x);
            }
            Case::Case5
        }
    }
}

/// Work done by [`for_each_black_leaf`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WalkStats {
    pub gray_nodes: u64,
    pub leaves: u64,
}

/// Calls `visit` for every black leaf below `m`, in increasing order.
pub fn for_each_black_leaf<M: TreeView>(
    mem: &M,
    shape: &TreeShape,
    m: u64,
    visit: &mut dyn FnMut(u64),
) -> WalkStats {
    let mut stats = WalkStats::default();
    match mem.root_color() {
        Color::White => {}
        Color::Black => {
            for leaf in 0..m {
                visit(leaf);
            }
            stats.leaves = m;
        }
        Color::Gray => {
            let hist = mem.load(0);
            walk_gray(mem, shape, m, NodeRef::root(shape), hist, visit, &mut stats);
        }
    }
    stats
}

fn walk_gray<M: TreeView>(
    mem: &M,
    shape: &TreeShape,
    m: u64,
    node: NodeRef,
    hist: M::Value,
    visit: &mut dyn FnMut(u64),
    stats: &mut WalkStats,
) {
    stats.gray_nodes += 1;
    let nav = nav_of(shape, hist, node.height);
    let pref = preferred_child(shape, nav);
    let alt = <M::Value as HistWord>::alt(shape.d() as u32);
    let mut nonwhite = nav.or(nav.shr(1)).and(alt);
    while let Some(b) = nonwhite.lsb() {
        nonwhite = nonwhite.with_pair(b, 0);
        let i = b / 2;
        let child = node.child(shape, i);
        let first = child.leftmost_leaf(shape);
        if first >= m {
            break;
        }
        match color_at(nav, i) {
            Color::Black => {
                let end = if child.height == 0 {
                    first + 1
                } else {
                    NodeRef { height: child.height, rank: child.rank + 1 }
                        .leftmost_leaf(shape)
                        .min(m)
                };
                for leaf in first..end {
                    visit(leaf);
                }
                stats.leaves += end - first;
            }
            Color::Gray => {
                let h = if pref == Some(i) { hist } else { mem.load(first) };
                walk_gray(mem, shape, m, child, h, visit, stats);
            }
            Color::White => unreachable!(),
        }
    }
}

/// Recomputes every color from `shadow` (the client record of the first `m`
/// leaves; leaves at or beyond `m` count as black), derives light paths,
/// historians and proxies by definition, and checks the storage invariants
/// against the memory cell by cell.
pub fn validate<M: TreeView>(
    mem: &M,
    shape: &TreeShape,
    m: u64,
    shadow: &dyn Fn(u64) -> Option<M::Value>,
) -> Result<(), Violation> {
    let zero = <M::Value as HistWord>::zero();
    let root_stored = mem.peek_root_color();
    if root_stored == Color::White {
        // Nothing is stored; all leaves must be unwritten.
        if let Some(l) = (0..m).find(|&l| shadow(l).is_some()) {
            return Err(Violation::new("1", format!("root white but leaf {l} was written")));
        }
        return Ok(());
    }

    let t = shape.t as usize;
    let d = shape.d();
    let mut colors: Vec<Vec<Color>> = Vec::with_capacity(t + 1);
    colors.push((0..m).map(|l| if shadow(l).is_some() { Color::Black } else { Color::White }).collect());
    for j in 1..=shape.t {
        let below = &colors[j as usize - 1];
        let count = shape.nodes_at(j, m);
        let level = (0..count)
            .map(|k| {
                let (mut white, mut black) = (false, false);
                for i in 0..d {
                    match below.get((k * d + i) as usize).copied().unwrap_or(Color::Black) {
                        Color::White => white = true,
                        Color::Black => black = true,
                        Color::Gray => {
                            white = true;
                            black = true;
                        }
                    }
                }
                match (white, black) {
                    (true, true) => Color::Gray,
                    (true, false) => Color::White,
                    _ => Color::Black,
                }
            })
            .collect();
        colors.push(level);
    }
    let color_of = |j: u32, k: u64| -> Color {
        colors[j as usize].get(k as usize).copied().unwrap_or(Color::Black)
    };
    let nav_vector = |j: u32, k: u64| -> M::Value {
        (0..d as u32).fold(zero, |nav, i| with_color(nav, i, color_of(j - 1, k * d + i as u64)))
    };

    let root = color_of(shape.t, 0);
    if root != root_stored {
        return Err(Violation::new("1", format!("root stored {root_stored:?}, actual {root:?}")));
    }
    if root == Color::White {
        return Err(Violation::new("1", "materialized root cannot be white"));
    }
    if root == Color::Black {
        for l in 0..m {
            if Some(mem.peek(l)) != shadow(l) {
                return Err(Violation::new("3", format!("all-black tree, A[{l}] differs from x_{l}")));
            }
        }
        return Ok(());
    }

    // Light paths, started at every top node.
    let mut on_path: Vec<Vec<bool>> = colors.iter().map(|lv| vec![false; lv.len()]).collect();
    let mut paths: Vec<(u64, u64)> = Vec::new();
    for j in (1..=shape.t).rev() {
        for k in 0..colors[j as usize].len() as u64 {
            if color_of(j, k) != Color::Gray {
                continue;
            }
            if j < shape.t {
                let parent_nav = nav_vector(j + 1, k / d);
                if preferred_child(shape, parent_nav) == Some((k % d) as u32) {
                    if color_of(j + 1, k / d) != Color::Gray {
                        return Err(Violation::new("structure", format!("gray node ({j},{k}) under non-gray parent")));
                    }
                    continue;
                }
            }
            // (j, k) is a top node.
            let mut hist = zero;
            let (mut hj, mut hk) = (j, k);
            while hj > 0 {
                if color_of(hj, hk) == Color::Gray {
                    if on_path[hj as usize][hk as usize] {
                        return Err(Violation::new("structure", format!("gray node ({hj},{hk}) on two light paths")));
                    }
                    on_path[hj as usize][hk as usize] = true;
                }
                let nav = nav_vector(hj, hk);
                hist = put_nav(shape, hist, hj, nav);
                let i = preferred_child(shape, nav).unwrap();
                hk = hk * d + i as u64;
                hj -= 1;
            }
            let historian = shape.leftmost(j, k);
            let proxy = hk;
            if proxy >= m || color_of(0, proxy) != Color::White {
                return Err(Violation::new("structure", format!("proxy {proxy} of ({j},{k}) is not a white leaf below m")));
            }
            let mask = <M::Value as HistWord>::ones(shape.nav_bits() * j);
            let stored = mem.peek(historian).and(mask);
            if stored != hist {
                return Err(Violation::new(
                    "2",
                    format!("historian {historian} of top ({j},{k}) holds {stored:?}, expected history {hist:?}"),
                ));
            }
            paths.push((historian, proxy));
        }
    }
    for (j, level) in colors.iter().enumerate().skip(1) {
        for (k, c) in level.iter().enumerate() {
            if *c == Color::Gray && !on_path[j][k] {
                return Err(Violation::new("structure", format!("gray node ({j},{k}) on no light path")));
            }
        }
    }

    // Roles of leaves.
    let mut historian_of = std::collections::HashMap::new();
    let mut proxy_of = std::collections::HashMap::new();
    for (idx, &(h, p)) in paths.iter().enumerate() {
        if historian_of.insert(h, idx).is_some() {
            return Err(Violation::new("structure", format!("leaf {h} is historian of two paths")));
        }
        proxy_of.insert(p, idx);
    }
    for (&h, &idx) in &historian_of {
        if let Some(&other) = proxy_of.get(&h) {
            if other != idx {
                return Err(Violation::new("structure", format!("leaf {h} is historian and proxy of different paths")));
            }
        }
    }
    let mut roles: Vec<u64> = historian_of.keys().chain(proxy_of.keys()).copied().collect();
    roles.sort_unstable();
    roles.dedup();
    for &(h, p) in &paths {
        let lo = roles.partition_point(|&r| r <= h);
        let hi = roles.partition_point(|&r| r < p);
        if lo < hi {
            return Err(Violation::new(
                "structure",
                format!("leaf {} lies strictly between historian {h} and its proxy {p}", roles[lo]),
            ));
        }
    }

    for l in 0..m {
        if historian_of.contains_key(&l) {
            continue;
        }
        if let Some(x) = shadow(l) {
            if mem.peek(l) != x {
                return Err(Violation::new("3", format!("black leaf {l}: A[{l}] = {:?}, x = {x:?}", mem.peek(l))));
            }
        } else if let Some(&idx) = proxy_of.get(&l) {
            let h = paths[idx].0;
            if let Some(xh) = shadow(h) {
                if mem.peek(l) != xh {
                    return Err(Violation::new("4", format!("proxy {l} does not hold x_{h}")));
                }
            }
        }
    }
    Ok(())
}
