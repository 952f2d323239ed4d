//! Deque-scenario partitions, `(l,r)`-cumulants and left/right canonical
//! operators on full Fock space, in exact arithmetic.
//!
//! Layers, bottom up:
//!
//! * [`partitions`]: set partitions, non-crossing partitions, permutation action.
//! * [`lukasiewicz`]: Lukasiewicz paths and their bijection with `NC(n)`.
//! * [`deque`]: double-ended queue scenarios and the families `P^(chi)(n)`.
//! * [`cumulants`]: the `(l,r)`-cumulant recursion over any moment functional.
//! * [`fock`]: the operator model and its bi-mixture coefficients.
//! * [`verify`]: exhaustive verification suites, as used by the `lrcum` CLI.

pub mod cumulants;
pub mod deque;
pub mod error;
pub mod exec;
pub mod fock;
pub mod lukasiewicz;
pub mod partitions;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
