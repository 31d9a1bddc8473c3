//! Words that hold histories: either a machine word, or a "large word" of
//! `C` consecutive machine words simulated with constant slowdown.

use std::fmt::Debug;

use crate::word::{alt_mask, Word};

/// The bit operations the light-path tree needs from the word type that
/// stores histories and client values.
pub trait HistWord: Copy + Eq + Debug {
    const WIDTH: u32;

    fn zero() -> Self;

    fn is_zero(&self) -> bool;

    fn and(self, o: Self) -> Self;

    fn or(self, o: Self) -> Self;

    fn not(self) -> Self;

    /// Left shift, dropping bits past `WIDTH`.
    fn shl(self, s: u32) -> Self;

    fn shr(self, s: u32) -> Self;

    /// Index of the lowest one bit.
    fn lsb(&self) -> Option<u32>;

    /// `0101...01` over the low `2 * pairs` bits.
    fn alt(pairs: u32) -> Self;

    /// Ones in the low `bits` bits.
    fn ones(bits: u32) -> Self;

    /// The two bits at `pos` (`pos` even).
    fn pair(&self, pos: u32) -> u8;

    fn with_pair(self, pos: u32, v: u8) -> Self;
}

macro_rules! impl_hist_word {
    ($($t:ty),*) => {$(
        impl HistWord for $t {
            const WIDTH: u32 = <$t>::BITS;

            #[inline]
            fn zero() -> Self {
                0
            }
            #[inline]
            fn is_zero(&self) -> bool {
                *self == 0
            }
            #[inline]
            fn and(self, o: Self) -> Self {
                self & o
            }
            #[inline]
            fn or(self, o: Self) -> Self {
                self | o
            }
            #[inline]
            fn not(self) -> Self {
                !self
            }
            #[inline]
            fn shl(self, s: u32) -> Self {
                Word::shl_mod(self, s)
            }
            #[inline]
            fn shr(self, s: u32) -> Self {
                Word::shr_trunc(self, s)
            }
            #[inline]
            fn lsb(&self) -> Option<u32> {
                if *self == 0 { None } else { Some(crate::word::lsb(*self)) }
            }
            #[inline]
            fn alt(pairs: u32) -> Self {
                alt_mask::<$t>(pairs)
            }
            #[inline]
            fn ones(bits: u32) -> Self {
                <$t as Word>::low_ones(bits)
            }
            #[inline]
            fn pair(&self, pos: u32) -> u8 {
                (*self >> pos) as u8 & 3
            }
            #[inline]
            fn with_pair(self, pos: u32, v: u8) -> Self {
                (self & !((3 as $t) << pos)) | ((v as $t & 3) << pos)
            }
        }
    )*};
}

impl_hist_word!(u8, u16, u32, u64);

/// `C` consecutive `W` cells read as one `C * w`-bit value; cell `i` holds
/// bits `[i w, (i+1) w)`.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct LargeWord<W: Word, const C: usize>(pub [W; C]);

impl<W: Word, const C: usize> Debug for LargeWord<W, C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LargeWord[")?;
        for (i, c) in self.0.iter().enumerate().rev() {
            if i + 1 != C {
                write!(f, "_")?;
            }
            write!(f, "{:0width$x}", c, width = (W::BITS / 4) as usize)?;
        }
        write!(f, "]")
    }
}

impl<W: Word, const C: usize> LargeWord<W, C> {
    #[inline]
    pub fn cell(&self, i: usize) -> W {
        self.0[i]
    }

    #[inline]
    pub fn set_cell(&mut self, i: usize, x: W) {
        self.0[i] = x;
    }
}

impl<W: Word, const C: usize> HistWord for LargeWord<W, C> {
    const WIDTH: u32 = W::BITS * C as u32;

    #[inline]
    fn zero() -> Self {
        LargeWord([W::zero(); C])
    }

    #[inline]
    fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    #[inline]
    fn and(mut self, o: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a = *a & b;
        }
        self
    }

    #[inline]
    fn or(mut self, o: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a = *a | b;
        }
        self
    }

    #[inline]
    fn not(mut self) -> Self {
        for a in self.0.iter_mut() {
            *a = !*a;
        }
        self
    }

    fn shl(self, s: u32) -> Self {
        let q = (s / W::BITS) as usize;
        let r = s % W::BITS;
        let mut out = [W::zero(); C];
        for i in q..C {
            let mut v = self.0[i - q].shl_mod(r);
            if r != 0 && i > q {
                v = v | self.0[i - q - 1].shr_trunc(W::BITS - r);
            }
            out[i] = v;
        }
        LargeWord(out)
    }

    fn shr(self, s: u32) -> Self {
        let q = (s / W::BITS) as usize;
        let r = s % W::BITS;
        let mut out = [W::zero(); C];
        for i in 0..C.saturating_sub(q) {
            let mut v = self.0[i + q].shr_trunc(r);
            if r != 0 && i + q + 1 < C {
                v = v | self.0[i + q + 1].shl_mod(W::BITS - r);
            }
            out[i] = v;
        }
        LargeWord(out)
    }

    #[inline]
    fn lsb(&self) -> Option<u32> {
        self.0
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| i as u32 * W::BITS + crate::word::lsb(self.0[i]))
    }

    fn alt(pairs: u32) -> Self {
        let bits = 2 * pairs;
        assert!(bits <= Self::WIDTH);
        let mut out = [W::zero(); C];
        let full = (bits / W::BITS) as usize;
        let full_mask = alt_mask::<W>(W::BITS / 2);
        for c in out.iter_mut().take(full) {
            *c = full_mask;
        }
        let rem = bits % W::BITS;
        if rem != 0 {
            out[full] = alt_mask::<W>(rem / 2);
        }
        LargeWord(out)
    }

    fn ones(bits: u32) -> Self {
        assert!(bits <= Self::WIDTH);
        let mut out = [W::zero(); C];
        let full = (bits / W::BITS) as usize;
        for c in out.iter_mut().take(full) {
            *c = W::max_value();
        }
        let rem = bits % W::BITS;
        if rem != 0 {
            out[full] = W::low_ones(rem);
        }
        LargeWord(out)
    }

    #[inline]
    fn pair(&self, pos: u32) -> u8 {
        let c = self.0[(pos / W::BITS) as usize];
        (c.shr_trunc(pos % W::BITS).to_u64() & 3) as u8
    }

    #[inline]
    fn with_pair(mut self, pos: u32, v: u8) -> Self {
        let i = (pos / W::BITS) as usize;
        let off = pos % W::BITS;
        let three = W::truncate(3);
        self.0[i] = (self.0[i] & !three.shl_mod(off)) | W::truncate(v as u64 & 3).shl_mod(off);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type L = LargeWord<u8, 4>;

    fn to_u32(x: L) -> u32 {
        u32::from_le_bytes(x.0)
    }

    fn from_u32(x: u32) -> L {
        LargeWord(x.to_le_bytes())
    }

    proptest! {
        #[test]
        fn large_word_matches_u32(a in any::<u32>(), b in any::<u32>(), s in 0u32..40) {
            let (la, lb) = (from_u32(a), from_u32(b));
            prop_assert_eq!(to_u32(la.and(lb)), a & b);
            prop_assert_eq!(to_u32(la.or(lb)), a | b);
            prop_assert_eq!(to_u32(la.not()), !a);
            prop_assert_eq!(to_u32(la.shl(s)), a.checked_shl(s).unwrap_or(0));
            prop_assert_eq!(to_u32(la.shr(s)), a.checked_shr(s).unwrap_or(0));
            prop_assert_eq!(la.lsb(), if a == 0 { None } else { Some(a.trailing_zeros()) });
            let pos = (s % 16) * 2;
            prop_assert_eq!(la.pair(pos) as u32, (a >> pos) & 3);
            let v = (b & 3) as u8;
            prop_assert_eq!(to_u32(la.with_pair(pos, v)), (a & !(3 << pos)) | ((v as u32) << pos));
        }
    }

    #[test]
    fn masks() {
        assert_eq!(to_u32(L::alt(16)), 0x5555_5555);
        assert_eq!(to_u32(L::alt(5)), 0x155);
        assert_eq!(to_u32(L::ones(32)), u32::MAX);
        assert_eq!(to_u32(L::ones(9)), 0x1ff);
        assert_eq!(<u64 as HistWord>::alt(8), 0x5555);
        assert_eq!(<u16 as HistWord>::ones(16), u16::MAX);
    }
}
