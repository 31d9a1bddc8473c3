//! The word-RAM model: a machine word of `w` bits and the constant-time bit
//! primitives built on it.

use std::fmt::{Debug, Display, LowerHex};
use std::hash::Hash;

use num_traits::{AsPrimitive, PrimInt, Unsigned, WrappingAdd, WrappingMul, WrappingSub};

/// An unsigned machine word of exactly `BITS` bits.
///
/// Implemented for `u8`, `u16`, `u32` and `u64`, so every structure in the
/// crate can be instantiated for small word lengths and checked exhaustively.
pub trait Word:
    PrimInt
    + Unsigned
    + WrappingAdd
    + WrappingSub
    + WrappingMul
    + AsPrimitive<u64>
    + Debug
    + Display
    + LowerHex
    + Default
    + Hash
    + Send
    + Sync
    + 'static
{
    const BITS: u32;

    /// Keeps the low `BITS` bits of `x`.
    fn truncate(x: u64) -> Self;

    #[inline]
    fn to_u64(self) -> u64 {
        self.as_()
    }

    /// Left shift modulo `2^w`; shifting by `BITS` or more yields zero.
    #[inline]
    fn shl_mod(self, s: u32) -> Self {
        if s >= Self::BITS {
            Self::zero()
        } else {
            self << s as usize
        }
    }

    /// Truncating right shift; shifting by `BITS` or more yields zero.
    #[inline]
    fn shr_trunc(self, s: u32) -> Self {
        if s >= Self::BITS {
            Self::zero()
        } else {
            self >> s as usize
        }
    }

    /// The word with the low `bits` bits set.
    #[inline]
    fn low_ones(bits: u32) -> Self {
        debug_assert!(bits <= Self::BITS);
        Self::max_value().shr_trunc(Self::BITS - bits)
    }
}

macro_rules! impl_word {
    ($($t:ty),*) => {$(
        impl Word for $t {
            const BITS: u32 = <$t>::BITS;

            #[inline]
            fn truncate(x: u64) -> Self {
                x as $t
            }
        }
    )*};
}

impl_word!(u8, u16, u32, u64);

const DEBRUIJN64: u64 = 0x03f7_9d71_b4cb_0a89;

const DEBRUIJN_TABLE: [u8; 64] = {
    let mut table = [0u8; 64];
    let mut i = 0;
    while i < 64 {
        table[((DEBRUIJN64 << i) >> 58) as usize] = i as u8;
        i += 1;
    }
    table
};

/// Index of the most significant set bit of `x`.
///
/// `x` must be nonzero.
#[inline]
pub fn msb<W: Word>(x: W) -> u32 {
    debug_assert!(!x.is_zero(), "msb of zero");
    W::BITS - 1 - x.leading_zeros()
}

/// Index of the least significant set bit of `x`.
///
/// `x` must be nonzero.
#[inline]
pub fn lsb<W: Word>(x: W) -> u32 {
    debug_assert!(!x.is_zero(), "lsb of zero");
    x.trailing_zeros()
}

/// Portable [`lsb`]: isolate the lowest one bit and look it up through a
/// de Bruijn multiplication. No hardware bit-scan is used.
#[inline]
pub fn lsb_portable<W: Word>(x: W) -> u32 {
    debug_assert!(!x.is_zero(), "lsb of zero");
    let x = x.to_u64();
    let isolated = x & x.wrapping_neg();
    DEBRUIJN_TABLE[(isolated.wrapping_mul(DEBRUIJN64) >> 58) as usize] as u32
}

/// Portable [`msb`]: smear the top bit downwards, keep only it, and reuse the
/// de Bruijn lookup.
#[inline]
pub fn msb_portable<W: Word>(x: W) -> u32 {
    debug_assert!(!x.is_zero(), "msb of zero");
    let mut x = x.to_u64();
    x |= x >> 1;
    x |= x >> 2;
    x |= x >> 4;
    x |= x >> 8;
    x |= x >> 16;
    x |= x >> 32;
    let top = x ^ (x >> 1);
    DEBRUIJN_TABLE[(top.wrapping_mul(DEBRUIJN64) >> 58) as usize] as u32
}

/// The word whose low `2 * pairs` bits read `0101...01`, i.e. `(2^(2 pairs) - 1) / 3`.
///
/// `2 * pairs` may equal the full word width; `2^(2 pairs)` is never formed.
#[inline]
pub fn alt_mask<W: Word>(pairs: u32) -> W {
    assert!(2 * pairs <= W::BITS, "alt_mask({pairs}) exceeds a {}-bit word", W::BITS);
    W::low_ones(2 * pairs) / W::truncate(3)
}

/// `⌈log₂ x⌉` for `x ≥ 1`; zero for `x ≤ 1`.
#[inline]
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_msb(x: u64) -> u32 {
        (0..64).rev().find(|&i| x >> i & 1 == 1).unwrap()
    }

    fn naive_lsb(x: u64) -> u32 {
        (0..64).find(|&i| x >> i & 1 == 1).unwrap()
    }

    #[test]
    fn msb_lsb_examples() {
        assert_eq!(msb(0b0110_0100u8), 6);
        assert_eq!(msb(1u32), 0);
        assert_eq!(msb(u64::MAX), 63);
        assert_eq!(msb(u16::MAX), 15);
        assert_eq!(lsb(0b0110_0100u8), 2);
        assert_eq!(lsb(1u64 << 63), 63);
        assert_eq!(lsb(0b1010u16), 1);
    }

    #[test]
    fn exhaustive_u8_and_u16() {
        for x in 1..=u8::MAX {
            let m = msb(x);
            let l = lsb(x);
            assert!(1u32 << m <= x as u32 && (x as u32) < 1u32 << (m + 1));
            assert_eq!(x as u32 % (1 << l), 0);
            assert_eq!(x >> l & 1, 1);
            assert_eq!(msb_portable(x), m);
            assert_eq!(lsb_portable(x), l);
        }
        for x in 1..=u16::MAX {
            assert_eq!(msb_portable(x), naive_msb(x as u64));
            assert_eq!(lsb_portable(x), naive_lsb(x as u64));
            assert_eq!(msb(x), naive_msb(x as u64));
            assert_eq!(lsb(x), naive_lsb(x as u64));
        }
    }

    #[test]
    fn alt_mask_values() {
        assert_eq!(alt_mask::<u64>(8), 0x5555);
        assert_eq!(alt_mask::<u8>(1), 0b01);
        assert_eq!(alt_mask::<u64>(32), 0x5555_5555_5555_5555);
        assert_eq!(alt_mask::<u8>(4), 0x55);
        for dt in 1..=32u32 {
            let m = alt_mask::<u64>(dt) as u128;
            assert_eq!(3 * m, (1u128 << (2 * dt)) - 1);
        }
        // full width: 3 * mask + 1 wraps to zero
        let full = alt_mask::<u32>(16);
        assert_eq!(full.wrapping_mul(3).wrapping_add(1), 0);
    }

    #[test]
    #[should_panic]
    fn alt_mask_overflow() {
        let _ = alt_mask::<u8>(5);
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(1024), 10);
        assert_eq!(ceil_log2(1025), 11);
    }

    proptest::proptest! {
        #[test]
        fn portable_matches_hardware(x in 1u64..) {
            proptest::prop_assert_eq!(msb_portable(x), msb(x));
            proptest::prop_assert_eq!(lsb_portable(x), lsb(x));
            proptest::prop_assert_eq!(msb(x), naive_msb(x));
            let y = x as u32;
            if y != 0 {
                proptest::prop_assert_eq!(msb_portable(y), msb(y));
                proptest::prop_assert_eq!(lsb_portable(y), lsb(y));
            }
        }
    }
}
