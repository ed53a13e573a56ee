//! Limited-memory BFGS trust-region solver with a two-scale dense initial
//! matrix.
//!
//! The quasi-Newton matrix is kept in compact form `B = γI + ΨMΨᵀ` and is
//! never materialised. Its partial eigendecomposition splits `Rⁿ` into the
//! span of the stored curvature pairs (the *parallel* subspace, where
//! curvature has been observed) and its orthogonal complement. The dense
//! initialization assigns a separate curvature scale `γ⊥` to the
//! complement:
//!
//! ```text
//! B̂₀ = γ P∥P∥ᵀ + γ⊥ P⊥P⊥ᵀ
//! ```
//!
//! Trust-region subproblems are posed in the shape-changing infinity norm
//! `‖p‖_{P,∞} = max(‖P∥ᵀp‖_∞, ‖P⊥ᵀp‖₂)`, which decouples them into `r`
//! scalar problems and one isotropic problem, each with a closed-form
//! solution.
//!
//! Module map:
//!
//! * [`pairstore`]: curvature-pair history with incrementally maintained
//!   Gram blocks.
//! * [`spectral`]: compact middle matrix, rank-revealing factorization,
//!   `P∥` products and the shape-changing norm.
//! * [`denseinit`]: the `γ`/`γ⊥` policy and the inverse compact
//!   representation of `B̂`.
//! * [`subproblem`]: closed-form subproblem solution and model value.
//! * [`driver`]: the outer trust-region iteration.
//! * [`problems`]: scalable test problems and a finite-difference checker.

// `!(x > 0.0)` is used on purpose so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod denseinit;
pub mod driver;
mod error;
pub mod pairstore;
pub mod par;
mod pivoted;
pub mod problems;
pub mod spectral;
pub mod subproblem;

pub use denseinit::{InitPolicy, InverseRep};
pub use driver::{
    minimize, minimize_with_observer, DenseParams, InitKind, IterateView, SolverConfig,
    SolverResult, Status, StepKind, StopRule, TraceRecord,
};
pub use error::{Error, Result};
pub use pairstore::{CurvaturePair, PairBuffer};
pub use problems::{Objective, Problem, ProblemKind};
pub use spectral::{CompactMiddle, SpectralFactorization};
pub use subproblem::{DecoupledProblem, SubproblemSolution};

/// Dense column vector used throughout the crate.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix; only ever `2m × 2m` or smaller in the solver path.
pub type Matrix = nalgebra::DMatrix<f64>;
