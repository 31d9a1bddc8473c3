//! Entries narrower than a word, and arrays whose initial contents are an
//! arbitrary function of the index.

use crate::arena::{Arena, FillPolicy, ProbeCounts};
use crate::clearable::ClearableArray;
use crate::contract::{InitializableArray, ParamError, Violation};
use crate::lightpath::CaseStats;
use crate::word::Word;

/// `n` entries of `b` bits packed into `⌈nb/w⌉` words.
///
/// The `⌊nb/w⌋` full words live in a [`ClearableArray`]; the partly used last
/// word is a separate cell zeroed at construction. An access touches at most
/// two words.
#[derive(Debug)]
pub struct PackedArray<W: Word> {
    n: usize,
    b: u32,
    words: Option<ClearableArray<W>>,
    tail: Option<Arena<W>>,
    full: u64,
}

impl<W: Word> PackedArray<W> {
    pub fn new(n: usize, b: u32, t: u32, fill: FillPolicy) -> Result<Self, ParamError> {
        if n == 0 {
            return Err(ParamError::EmptyUniverse);
        }
        if b == 0 || b > W::BITS {
            return Err(ParamError::BadEntryWidth { b, w: W::BITS });
        }
        let bits = n as u64 * b as u64;
        let full = bits / W::BITS as u64;
        let words = match full {
            0 => None,
            f => Some(ClearableArray::new(f as usize, t, fill)?),
        };
        let tail = (bits % W::BITS as u64 != 0).then(|| {
            let mut a = Arena::new(1, fill);
            a.store(0, W::zero());
            a
        });
        Ok(PackedArray { n, b, words, tail, full })
    }

    pub fn entry_width(&self) -> u32 {
        self.b
    }

    fn word(&self, k: u64) -> W {
        if k < self.full {
            self.words.as_ref().expect("full words").read(k as usize)
        } else {
            self.tail.as_ref().expect("tail word").load(0)
        }
    }

    fn set_word(&mut self, k: u64, x: W) {
        if k < self.full {
            self.words.as_mut().expect("full words").write(k as usize, x)
        } else {
            self.tail.as_mut().expect("tail word").store(0, x)
        }
    }
}

impl<W: Word> InitializableArray<W> for PackedArray<W> {
    fn name(&self) -> String {
        format!("packed(b={})", self.b)
    }

    fn len(&self) -> usize {
        self.n
    }

    fn read(&self, index: usize) -> W {
        let w = W::BITS;
        let bit = index as u64 * self.b as u64;
        let (k, off) = (bit / w as u64, (bit % w as u64) as u32);
        let lo = self.word(k).shr_trunc(off);
        let v = if off + self.b > w { lo | self.word(k + 1).shl_mod(w - off) } else { lo };
        v & W::low_ones(self.b)
    }

    fn write(&mut self, index: usize, value: W) {
        debug_assert!(value <= W::low_ones(self.b), "value {value} exceeds {} bits", self.b);
        let w = W::BITS;
        let mask = W::low_ones(self.b);
        let value = value & mask;
        let bit = index as u64 * self.b as u64;
        let (k, off) = (bit / w as u64, (bit % w as u64) as u32);
        if self.b == w {
            self.set_word(k, value);
            return;
        }
        let lo = self.word(k);
        self.set_word(k, (lo & !mask.shl_mod(off)) | value.shl_mod(off));
        if off + self.b > w {
            let spill = off + self.b - w;
            let hi = self.word(k + 1);
            let m = W::low_ones(spill);
            self.set_word(k + 1, (hi & !m) | (value.shr_trunc(w - off) & m));
        }
    }

    fn space_bits(&self) -> u64 {
        self.words.as_ref().map_or(0, |a| a.space_bits()) + self.tail.as_ref().map_or(0, |_| W::BITS as u64)
    }

    fn entry_bits(&self) -> u32 {
        self.b
    }

    fn probes(&self) -> ProbeCounts {
        self.words.as_ref().map(|a| a.probes()).unwrap_or_default()
            + self.tail.as_ref().map(|a| a.snapshot_counters()).unwrap_or_default()
    }

    fn validate(&self, shadow: &[Option<W>]) -> Result<(), Violation> {
        for (l, s) in shadow.iter().enumerate() {
            if self.read(l) != s.unwrap_or(W::zero()) {
                return Err(Violation::new("packed", format!("entry {l} reads wrong value")));
            }
        }
        Ok(())
    }

    fn case_stats(&self) -> Option<CaseStats> {
        self.words.as_ref().and_then(|a| a.case_stats())
    }
}

/// Presents `inner` as an array whose fresh entry `ℓ` reads `g(ℓ)`.
///
/// Stored 0 and stored `g(ℓ)` trade meanings; every other value is kept as
/// is. The swap is an involution, so wrapping twice with the same `g` gives
/// back the behavior of `inner`.
pub struct WithDefault<W, A, G> {
    inner: A,
    g: G,
    _w: std::marker::PhantomData<W>,
}

impl<W: Word, A: InitializableArray<W>, G: Fn(usize) -> W> WithDefault<W, A, G> {
    pub fn new(inner: A, g: G) -> Self {
        WithDefault { inner, g, _w: std::marker::PhantomData }
    }

    pub fn inner(&self) -> &A {
        &self.inner
    }

    fn swap(&self, index: usize, x: W) -> W {
        let g = (self.g)(index);
        if x.is_zero() {
            g
        } else if x == g {
            W::zero()
        } else {
            x
        }
    }
}

impl<W: Word, A: InitializableArray<W>, G: Fn(usize) -> W> InitializableArray<W> for WithDefault<W, A, G> {
    fn name(&self) -> String {
        format!("with-default({})", self.inner.name())
    }

    fn len(&self) -> usize {
        self.inner.len()
    }

    fn read(&self, index: usize) -> W {
        self.swap(index, self.inner.read(index))
    }

    fn initial_value(&self, index: usize) -> W {
        self.swap(index, self.inner.initial_value(index))
    }

    fn write(&mut self, index: usize, value: W) {
        let x = self.swap(index, value);
        self.inner.write(index, x)
    }

    fn space_bits(&self) -> u64 {
        self.inner.space_bits()
    }

    fn entry_bits(&self) -> u32 {
        self.inner.entry_bits()
    }

    fn probes(&self) -> ProbeCounts {
        self.inner.probes()
    }

    /// The shadow records client values; the inner array sees them swapped.
    fn validate(&self, shadow: &[Option<W>]) -> Result<(), Violation> {
        let inner: Vec<Option<W>> = shadow.iter().enumerate().map(|(l, s)| s.map(|x| self.swap(l, x))).collect();
        self.inner.validate(&inner)
    }

    fn case_stats(&self) -> Option<CaseStats> {
        self.inner.case_stats()
    }
}
