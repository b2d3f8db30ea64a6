//! Multiset lattices, shadows and compressions, graph pebbling, and
//! randomized threshold experiments over them.

pub mod error;
pub mod experiments;
pub mod graph;
pub mod multichoose;
pub mod multiset;
pub mod pebbling;
pub mod reference;
pub mod shadow;
pub mod sweeps;

pub use error::{Error, Result};
