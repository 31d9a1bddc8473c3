//! Building any method of the crate by name, for the harness and the CLI.

use std::fmt;
use std::str::FromStr;

use crate::arena::FillPolicy;
use crate::baselines::{navarro, trie_instance, FolkloreArray, TrieKind};
use crate::clearable::ClearableArray;
use crate::contract::{InitializableArray, ParamError};
use crate::extensions::{PackedArray, WithDefault};
use crate::lightpath::{Forest, HistWord, LightPathArray, PartialLightPathArray};
use crate::oracle::PlainArray;
use crate::word::{ceil_log2, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Oracle,
    Trie(TrieKind),
    Folklore,
    Navarro,
    /// A single perfect tree, `n = d^t`.
    Core,
    /// A single tree with `n <= d^t` leaves.
    Partial,
    Forest,
    /// The top-level clearable word array.
    Clearable,
    Packed,
    /// Clearable array with initial values `ℓ + 1`.
    WithDefault,
}

impl Method {
    pub const ALL: [Method; 14] = [
        Method::Oracle,
        Method::Trie(TrieKind::Plain),
        Method::Trie(TrieKind::Simple),
        Method::Trie(TrieKind::Hierarchic),
        Method::Trie(TrieKind::SimpleH),
        Method::Trie(TrieKind::Shv),
        Method::Folklore,
        Method::Navarro,
        Method::Core,
        Method::Partial,
        Method::Forest,
        Method::Clearable,
        Method::Packed,
        Method::WithDefault,
    ];

    pub fn is_lightpath(self) -> bool {
        matches!(self, Method::Core | Method::Partial | Method::Forest | Method::Clearable | Method::Packed | Method::WithDefault)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Oracle => "oracle",
            Method::Trie(TrieKind::Plain) => "plain",
            Method::Trie(TrieKind::Simple) => "simple",
            Method::Trie(TrieKind::Hierarchic) => "hierarchic",
            Method::Trie(TrieKind::SimpleH) => "simple-h",
            Method::Trie(TrieKind::Shv) => "shv",
            Method::Folklore => "folklore",
            Method::Navarro => "navarro",
            Method::Core => "lightpath-core",
            Method::Partial => "lightpath-partial",
            Method::Forest => "forest",
            Method::Clearable => "lightpath",
            Method::Packed => "packed",
            Method::WithDefault => "with-default",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| {
                let names: Vec<String> = Method::ALL.iter().map(|m| m.to_string()).collect();
                format!("unknown method {s:?}; expected one of {}", names.join(", "))
            })
    }
}

/// Method parameters; `None` picks a default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Params {
    pub t: Option<u32>,
    /// Navarro height.
    pub h: Option<usize>,
    /// Entry width for tries and packed arrays.
    pub b: Option<u32>,
}

pub const DEFAULT_T: u32 = 2;

/// `(d, t)` for a single tree over `n` leaves: the given `t`, or the smallest
/// degree whose history still fits a word.
pub fn tree_params(n: u64, t: Option<u32>, w: u32, perfect: bool) -> Result<(u64, u32), ParamError> {
    if n == 0 {
        return Err(ParamError::EmptyUniverse);
    }
    let fits = |d: u64, t: u32| 2 * d * t as u64 <= w as u64;
    let mut d = 2u64;
    while 2 * d <= w as u64 {
        let tt = match t {
            Some(t) => t,
            None => ceil_log2(n).div_ceil(d.trailing_zeros()).max(1),
        };
        let cap = d.checked_pow(tt);
        let ok = match cap {
            Some(c) if perfect => c == n,
            Some(c) => c >= n,
            None => !perfect,
        };
        if ok && fits(d, tt) {
            return Ok((d, tt));
        }
        d *= 2;
    }
    Err(ParamError::Other(format!(
        "no tree with a {w}-bit history {} n = {n}{}",
        if perfect { "has exactly" } else { "covers" },
        t.map(|t| format!(" at t = {t}")).unwrap_or_default()
    )))
}

/// Builds `method` over `n` entries on a fresh arena filled per `fill`.
pub fn build<W: Word + HistWord>(
    method: Method,
    n: usize,
    p: Params,
    fill: FillPolicy,
) -> Result<Box<dyn InitializableArray<W>>, ParamError> {
    let w = W::BITS;
    let b = p.b.unwrap_or(w);
    if b == 0 || b > w {
        return Err(ParamError::BadEntryWidth { b, w });
    }
    let t = p.t.unwrap_or(DEFAULT_T);
    Ok(match method {
        Method::Oracle => Box::new(PlainArray::<W>::new(n, fill)?),
        Method::Trie(kind) => Box::new(trie_instance::<W>(kind, n, b, fill)?),
        Method::Folklore => Box::new(FolkloreArray::<W>::new(n, <W as num_traits::Zero>::zero(), fill)?),
        Method::Navarro => Box::new(navarro::<W>(n, b, p.h.unwrap_or(1), fill)?),
        Method::Core => {
            let (d, t) = tree_params(n as u64, p.t, w, true)?;
            Box::new(LightPathArray::<W>::new(d, t, fill)?)
        }
        Method::Partial => {
            let (d, t) = tree_params(n as u64, p.t, w, false)?;
            Box::new(PartialLightPathArray::<W>::new(n, d, t, fill)?)
        }
        Method::Forest => Box::new(Forest::<W>::new(n, t, fill)?),
        Method::Clearable => Box::new(ClearableArray::<W>::new(n, t, fill)?),
        Method::Packed => Box::new(PackedArray::<W>::new(n, b, t, fill)?),
        Method::WithDefault => {
            let inner = ClearableArray::<W>::new(n, t, fill)?;
            Box::new(WithDefault::new(inner, |l| W::truncate(l as u64 + 1)))
        }
    })
}
