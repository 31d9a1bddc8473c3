//! Clearable word arrays: arrays of `n` machine words that start out all
//! zero after a constant number of steps, using `n w + ⌈n (t/(2w))^t⌉` bits
//! and `O(t)` time per access.
//!
//! The main type is [`ClearableArray`]. The building blocks (single trees,
//! forests), the classical methods it is compared against, and a reference
//! oracle with a replay harness are public as well.

pub mod arena;
pub mod baselines;
pub mod certify;
pub mod clearable;
pub mod contract;
pub mod extensions;
pub mod lightpath;
pub mod methods;
pub mod oracle;
pub mod word;

pub use arena::{Arena, FillPolicy, ProbeCounts};
pub use clearable::{redundancy_bound, ClearableArray, Representation};
pub use contract::{InitializableArray, ParamError, Violation};
pub use extensions::{PackedArray, WithDefault};
pub use lightpath::{Forest, LightPathArray, PartialLightPathArray};
pub use methods::{build, Method, Params};
pub use word::Word;

pub type ClearableArray8 = ClearableArray<u8>;
pub type ClearableArray16 = ClearableArray<u16>;
pub type ClearableArray32 = ClearableArray<u32>;
pub type ClearableArray64 = ClearableArray<u64>;

pub type LightPathArray8 = LightPathArray<u8>;
pub type LightPathArray16 = LightPathArray<u16>;
pub type LightPathArray32 = LightPathArray<u32>;
pub type LightPathArray64 = LightPathArray<u64>;

pub type PackedArray8 = PackedArray<u8>;
pub type PackedArray16 = PackedArray<u16>;
pub type PackedArray32 = PackedArray<u32>;
pub type PackedArray64 = PackedArray<u64>;
