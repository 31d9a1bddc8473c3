//! Classical constant-time-initializable arrays: the trie family and the
//! folklore method.

pub mod folklore;
pub mod trie;

pub use folklore::FolkloreArray;
pub use trie::{TrieArray, TrieConfig};

use crate::arena::FillPolicy;
use crate::contract::ParamError;
use crate::word::Word;

/// The named trie instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrieKind {
    Plain,
    Simple,
    Hierarchic,
    SimpleH,
    Shv,
}

impl TrieKind {
    pub const ALL: [TrieKind; 5] = [TrieKind::Plain, TrieKind::Simple, TrieKind::Hierarchic, TrieKind::SimpleH, TrieKind::Shv];

    pub fn config(self, n: u64, b: u32, w: u32) -> TrieConfig {
        match self {
            TrieKind::Plain => TrieConfig::plain(n, b),
            TrieKind::Simple => TrieConfig::simple(n, b),
            TrieKind::Hierarchic => TrieConfig::hierarchic(n, b, w),
            TrieKind::SimpleH => TrieConfig::simple_h(n, b, w),
            TrieKind::Shv => TrieConfig::shv(n, b, w),
        }
    }
}

pub fn trie_instance<W: Word>(kind: TrieKind, n: usize, b: u32, fill: FillPolicy) -> Result<TrieArray<W>, ParamError> {
    TrieArray::new(n, b, kind.config(n as u64, b, W::BITS), W::zero(), fill)
}

/// Hierarchic levels up to height `h + 1`, the top one certified.
pub fn navarro<W: Word>(n: usize, b: u32, h: usize, fill: FillPolicy) -> Result<TrieArray<W>, ParamError> {
    TrieArray::new(n, b, TrieConfig::navarro(b, W::BITS, h), W::zero(), fill)
}
