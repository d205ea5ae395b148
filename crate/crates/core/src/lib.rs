//! Pattern avoidance in t-dimensional 0-1 matrices.
//!
//! The crate covers storage of 0-1 tensors ([`tensor`]), t-patterns and
//! their classification ([`pattern`]), containment search
//! ([`containment`]), divisions and full divisions ([`division`]),
//! colourful face counts and shadow bounds ([`shadow`]), and exact extremal
//! numbers and counts ([`extremal`]).

pub mod cli;
pub mod containment;
pub mod division;
pub mod error;
pub mod extremal;
pub mod oracle;
pub mod pattern;
pub mod shadow;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use pattern::{Pattern, SunflowerSpec};
pub use tensor::{BitTensor, Coord, Shape};
