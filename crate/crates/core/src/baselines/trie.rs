//! The trie method: a tree over the `n b` data bits whose inner nodes carry
//! "initialized" bits, parameterized by a degree sequence.
//!
//! Leaves of the tree are data bits; a height-`j` node has `d_j` children.
//! A node's bit is 1 once the node was *processed*, which clears the bits
//! of its children (or, at height 1, fills its data bits with the initial
//! value). An entry reads as the initial value when some node on its path
//! has bit 0. The top levels may be processed at initialization; their bits
//! are then implicit. The topmost stored level may instead be certified
//! word by word (the hybrid with the folklore method).

use crate::arena::{Arena, FillPolicy, ProbeCounts};
use crate::certify::Certifier;
use crate::contract::{InitializableArray, ParamError, Violation};
use crate::word::Word;

/// Construction parameters of a trie.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrieConfig {
    pub name: String,
    /// `(d_1, ..., d_h)`; their product must cover `n b`.
    pub degrees: Vec<u64>,
    /// Number of top levels processed at initialization.
    pub preprocessed: usize,
    /// Whether the top level's bit words are certified instead of cleared
    /// (its nodes then need no parent).
    pub certified_top: bool,
}

impl TrieConfig {
    pub fn plain(n: u64, b: u32) -> Self {
        TrieConfig { name: "plain".into(), degrees: vec![n * b as u64], preprocessed: 1, certified_top: false }
    }

    pub fn simple(n: u64, b: u32) -> Self {
        TrieConfig { name: "simple".into(), degrees: vec![b as u64, n], preprocessed: 1, certified_top: false }
    }

    /// `(b, w, ..., w)` with the fewest `w`s such that `w^k >= n`.
    pub fn hierarchic(n: u64, b: u32, w: u32) -> Self {
        let mut degrees = vec![b as u64];
        let mut cover = 1u64;
        while cover < n {
            degrees.push(w as u64);
            cover = cover.saturating_mul(w as u64);
        }
        TrieConfig { name: "hierarchic".into(), degrees, preprocessed: 0, certified_top: false }
    }

    pub fn simple_h(n: u64, b: u32, w: u32) -> Self {
        TrieConfig {
            name: "simple-h".into(),
            degrees: vec![b as u64, n.div_ceil(w as u64), w as u64],
            preprocessed: 0,
            certified_top: false,
        }
    }

    pub fn shv(n: u64, b: u32, w: u32) -> Self {
        TrieConfig {
            name: "shv".into(),
            degrees: vec![b as u64, w as u64, n.div_ceil(w as u64)],
            preprocessed: 1,
            certified_top: false,
        }
    }

    /// Hierarchic levels `1..=h+1`, with the words of level `h+1` certified.
    pub fn navarro(b: u32, w: u32, h: usize) -> Self {
        let mut degrees = vec![b as u64];
        degrees.extend(std::iter::repeat_n(w as u64, h));
        TrieConfig { name: format!("navarro(h={h})"), degrees, preprocessed: 0, certified_top: true }
    }
}

#[derive(Clone, Copy, Debug)]
struct Level {
    /// Number of nodes.
    count: u64,
    /// Data bits below one node.
    span: u64,
    /// First cell of the bit region, if the bits are stored.
    cells: Option<usize>,
}

#[derive(Debug)]
pub struct TrieArray<W: Word> {
    arena: Arena<W>,
    name: String,
    n: u64,
    b: u32,
    init: W,
    /// Heights `1..=h`, at index `j - 1`.
    levels: Vec<Level>,
    degrees: Vec<u64>,
    cert: Option<Certifier>,
    stored_bits: u64,
    cert_bits: u64,
}

impl<W: Word> TrieArray<W> {
    pub fn new(n: usize, b: u32, config: TrieConfig, init: W, fill: FillPolicy) -> Result<Self, ParamError> {
        let n = n as u64;
        if n == 0 {
            return Err(ParamError::EmptyUniverse);
        }
        if b == 0 || b > W::BITS {
            return Err(ParamError::BadEntryWidth { b, w: W::BITS });
        }
        let degrees = config.degrees;
        if degrees.contains(&0) {
            return Err(ParamError::Zero { name: "degree" });
        }
        let h = degrees.len();
        if config.preprocessed > h {
            return Err(ParamError::Other("more preprocessed levels than levels".into()));
        }
        let w = W::BITS as u64;
        let data_words = (n * b as u64).div_ceil(w) as usize;
        let mut levels = Vec::with_capacity(h);
        let mut count = n * b as u64;
        let mut span = 1u64;
        let mut next = data_words;
        let mut stored_bits = 0;
        for (j, &d) in degrees.iter().enumerate() {
            count = count.div_ceil(d);
            span = span.saturating_mul(d);
            let stored = j < h - config.preprocessed;
            let cells = stored.then(|| {
                let at = next;
                next += count.div_ceil(w) as usize;
                stored_bits += count;
                at
            });
            levels.push(Level { count, span, cells });
        }
        if !config.certified_top && count != 1 {
            return Err(ParamError::Other(format!("degree sequence covers {} of {} bits", span, n * b as u64)));
        }
        let (cert, cert_bits) = if config.certified_top {
            if config.preprocessed != 0 {
                return Err(ParamError::Other("certified top level cannot be preprocessed".into()));
            }
            let words = count.div_ceil(w);
            if w < 64 && words >> w != 0 {
                return Err(ParamError::UniverseTooLarge { n, w: W::BITS });
            }
            let c = Certifier::at(next, words);
            next += Certifier::cells(words);
            (Some(c), Certifier::space_bits(words, W::BITS))
        } else {
            (None, 0)
        };
        let mut t = TrieArray {
            arena: Arena::new(next, fill),
            name: config.name,
            n,
            b,
            init: init & W::low_ones(b),
            levels,
            degrees,
            cert,
            stored_bits,
            cert_bits,
        };
        t.initialize(config.preprocessed);
        Ok(t)
    }

    fn initialize(&mut self, preprocessed: usize) {
        let h = self.levels.len();
        if let Some(c) = self.cert {
            c.init(&mut self.arena);
            return;
        }
        if preprocessed == 0 {
            let root = self.levels[h - 1].cells.unwrap();
            self.arena.store(root, W::zero());
            return;
        }
        for j in (h - preprocessed + 1..=h).rev() {
            for r in 0..self.levels[j - 1].count {
                self.process(j, r);
            }
        }
    }

    pub fn arena(&self) -> &Arena<W> {
        &self.arena
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    fn is_top_certified(&self, j: usize) -> bool {
        self.cert.is_some() && j == self.levels.len()
    }

    fn bit(&self, j: usize, r: u64, peek: bool) -> Option<bool> {
        let cells = self.levels[j - 1].cells?;
        let w = W::BITS as u64;
        if self.is_top_certified(j) {
            let cert = self.cert.unwrap();
            let ok = if peek { cert.peek_certified(&self.arena, r / w) } else { cert.is_certified(&self.arena, r / w) };
            if !ok {
                return Some(false);
            }
        }
        let c = cells + (r / w) as usize;
        let word = if peek { self.arena.peek(c) } else { self.arena.load(c) };
        Some(word.shr_trunc((r % w) as u32) & W::one() == W::one())
    }

    fn set_bit(&mut self, j: usize, r: u64) {
        let Some(cells) = self.levels[j - 1].cells else { return };
        let w = W::BITS as u64;
        let c = cells + (r / w) as usize;
        let word = if self.is_top_certified(j) && !self.cert.unwrap().is_certified(&self.arena, r / w) {
            self.cert.unwrap().certify(&mut self.arena, r / w);
            W::zero()
        } else {
            self.arena.load(c)
        };
        self.arena.store(c, word | W::one().shl_mod((r % w) as u32));
    }

    /// Clears bits `[lo, hi)` of the region at `cells`, whole words where possible.
    fn clear_bits(&mut self, cells: usize, lo: u64, hi: u64) {
        let w = W::BITS as u64;
        let mut i = lo;
        while i < hi {
            let off = i % w;
            let len = (w - off).min(hi - i);
            if len == w {
                self.arena.store(cells + (i / w) as usize, W::zero());
            } else {
                self.arena.store_field(cells as u64 * w + i, len as u32, W::zero());
            }
            i += len;
        }
    }

    fn process(&mut self, j: usize, r: u64) {
        let lv = self.levels[j - 1];
        if j == 1 {
            let total = self.n * self.b as u64;
            let lo = r * lv.span;
            let hi = ((r + 1) * lv.span).min(total);
            if self.init.is_zero() {
                self.clear_bits(0, lo, hi);
            } else {
                let b = self.b as u64;
                for e in lo / b..hi.div_ceil(b) {
                    self.arena.store_field(e * b, self.b, self.init);
                }
            }
        } else {
            let below = self.levels[j - 2];
            let d = self.degrees[j - 1];
            if let Some(cells) = below.cells {
                let lo = r * d;
                let hi = ((r + 1) * d).min(below.count);
                self.clear_bits(cells, lo, hi);
            }
        }
        self.set_bit(j, r);
    }

    fn rank(&self, j: usize, index: u64) -> u64 {
        index * self.b as u64 / self.levels[j - 1].span
    }

    fn read_impl(&self, index: usize, peek: bool) -> W {
        let index = index as u64;
        for j in (1..=self.levels.len()).rev() {
            if self.bit(j, self.rank(j, index), peek) == Some(false) {
                return self.init;
            }
        }
        let (bit, len) = (index * self.b as u64, self.b);
        if peek {
            let w = W::BITS as u64;
            let lo = self.arena.peek((bit / w) as usize).shr_trunc((bit % w) as u32);
            let got = W::BITS - (bit % w) as u32;
            let v = if got < len { lo | self.arena.peek((bit / w) as usize + 1).shl_mod(got) } else { lo };
            v & W::low_ones(len)
        } else {
            self.arena.load_field(bit, len)
        }
    }
}

impl<W: Word> InitializableArray<W> for TrieArray<W> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn len(&self) -> usize {
        self.n as usize
    }

    fn read(&self, index: usize) -> W {
        self.read_impl(index, false)
    }

    fn initial_value(&self, _index: usize) -> W {
        self.init
    }

    fn write(&mut self, index: usize, value: W) {
        debug_assert!((index as u64) < self.n);
        let i = index as u64;
        for j in (1..=self.levels.len()).rev() {
            let r = self.rank(j, i);
            if self.bit(j, r, false) == Some(false) {
                self.process(j, r);
            }
        }
        self.arena.store_field(i * self.b as u64, self.b, value);
    }

    fn space_bits(&self) -> u64 {
        self.n * self.b as u64 + self.stored_bits + self.cert_bits
    }

    fn entry_bits(&self) -> u32 {
        self.b
    }

    fn probes(&self) -> ProbeCounts {
        self.arena.snapshot_counters()
    }

    fn validate(&self, shadow: &[Option<W>]) -> Result<(), Violation> {
        for (l, s) in shadow.iter().enumerate() {
            let want = s.map_or(self.init, |x| x & W::low_ones(self.b));
            if self.read_impl(l, true) != want {
                return Err(Violation::new("trie", format!("entry {l} reads wrong value")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_shapes() {
        assert_eq!(TrieConfig::hierarchic(4096, 64, 64).degrees, vec![64, 64, 64]);
        assert_eq!(TrieConfig::hierarchic(1, 8, 64).degrees, vec![8]);
        assert_eq!(TrieConfig::simple_h(1000, 64, 64).degrees, vec![64, 16, 64]);
        assert_eq!(TrieConfig::shv(1000, 64, 64).degrees, vec![64, 64, 16]);
    }

    #[test]
    fn redundancy_of_instances() {
        let n = 1 << 12;
        let plain = TrieArray::<u64>::new(n, 64, TrieConfig::plain(n as u64, 64), 0, FillPolicy::Ones).unwrap();
        assert_eq!(plain.redundancy_bits(), 0);
        let simple = TrieArray::<u64>::new(n, 64, TrieConfig::simple(n as u64, 64), 0, FillPolicy::Ones).unwrap();
        assert_eq!(simple.redundancy_bits(), n as u64);
        let h = TrieArray::<u64>::new(n, 64, TrieConfig::hierarchic(n as u64, 64, 64), 0, FillPolicy::Ones).unwrap();
        assert_eq!(h.redundancy_bits(), n as u64 + 64 + 1);
        assert_eq!(h.probes().writes, 1);
    }

    #[test]
    fn process_is_idempotent() {
        let mut t = TrieArray::<u64>::new(300, 64, TrieConfig::hierarchic(300, 64, 64), 0, FillPolicy::Ones).unwrap();
        t.write(5, 9);
        let before = t.probes().writes;
        t.write(6, 1);
        // entry 6 shares its height-2 parent with entry 5: only its own node is processed
        assert_eq!(t.probes().writes - before, 2 + 1);
        assert_eq!(t.read(5), 9);
        assert_eq!(t.read(6), 1);
        assert_eq!(t.read(7), 0);
    }
}
