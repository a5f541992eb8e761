//! Imaginarity-based steering tests for two-qubit states.
//!
//! The crate evaluates the two-setting imaginarity steering functional `I₂`
//! (operationally from conditional states and in closed form from Fano
//! parameters), the competing CFFW, NAQC and NAQI criteria, the sixteen
//! witness operators with their local projector decompositions, and the
//! tripartite monogamy relation.

pub mod audit;
pub mod error;
pub mod imaginarity;
pub mod linalg;
pub mod monogamy;
pub mod rng;
pub mod states;
pub mod steering;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{Axis, ComplexMatrix, Keep, C64};
pub use states::{BlochTwoQubit, DensityMatrix, SampleKind, StateSpec, TripartiteParams, XStateParams};

/// The local bound of the two-setting functional.
pub const ISI_BOUND: f64 = std::f64::consts::SQRT_2;
/// Margin above [`ISI_BOUND`] before a value counts as a violation.
pub const VIOLATION_MARGIN: f64 = 1e-12;
