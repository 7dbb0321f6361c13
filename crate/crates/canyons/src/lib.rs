//! Symbolic-numeric engine for plane analytic germs `f(x, y)`.
//!
//! Given a germ that is mini-regular in `x` and free of multiple roots, the
//! crate computes its polar arcs (Puiseux roots of `∂f/∂x`), gradient degrees
//! and gradient canyons, the leading data `(h0, a0)` of `f` along each polar
//! arc, the refined pair data `(m, ν)`, and the per-tangent-line packets whose
//! multiset is invariant under bi-Lipschitz equivalence up to a `ℂ*` rescaling
//! action. A constraint solver decides whether two such invariants can be
//! identified by the action, producing witness constants or refutation
//! certificates.
//!
//! Arithmetic is exact (Gaussian rationals) wherever the input allows and
//! falls back to arbitrary-precision complex balls with tracked error radii
//! otherwise.

pub mod config;
pub mod equivalence;
pub mod error;
pub mod invariant;
pub mod oracle;
pub mod par;
pub mod pipeline;
pub mod polar;
pub mod poly;
pub mod puiseux;
pub mod ratio;
pub mod scalar;
pub mod series;

pub use config::Options;
pub use error::{Error, Result};
pub use pipeline::{analyze, compare, AnalysisReport, ComparisonReport};
pub use ratio::{Q, XRat};
pub use scalar::Scalar;
