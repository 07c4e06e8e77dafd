//! Stability invariants of arcs, Chow numbers of parametrized cycles and
//! birational descendants of degenerating plane-curve families.

pub mod algebra;
pub mod arcs;
pub mod chow;
pub mod descendants;
pub mod error;
pub mod numeric;

pub use error::{Error, Result};
