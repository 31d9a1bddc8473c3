//! Light-path trees: the clearable arrays built from colored `d`-ary trees.

pub mod core_array;
pub mod forest;
pub mod history;
pub mod partial;
pub mod tree;

pub use core_array::{Fault, LightPathArray};
pub use forest::Forest;
pub use history::{HistWord, LargeWord};
pub use partial::PartialLightPathArray;
pub use tree::{Case, CaseStats, Color, NodeRef, TreeShape, WalkStats};
