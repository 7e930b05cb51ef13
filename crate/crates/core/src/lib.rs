//! Rank-one perturbations of 2-isometries on finite weighted coefficient spaces.
//!
//! A [`WeightedSpace`] carries the inner product `<x, y> = sum w_i x_i conj(y_i)`.
//! An [`Operator`] is a matrix on that space together with a bound on how far
//! it raises polynomial degree, which decides where truncated computations are
//! exact. [`theorem_verdict`] evaluates the structural conditions for
//! `T + u ⊗ v` to be a 2-isometry and compares them with a direct defect check.

pub mod analysis;
pub mod error;
pub mod function_spaces;
pub mod io;
pub mod operator;
pub mod reproduce;
pub mod sampling;
pub mod search;
pub mod space;

pub use analysis::{
    branch, canonical_x, compute_s, condition_iia_residual, condition_iib_residual, gamma,
    invariance_defect, kernel_condition_residual, normalize_pair, theorem_verdict, Branch,
    IiaResidual, PerturbationProblem, ProblemBuilder, TheoremReport, DEFAULT_TOL_DEFECT,
    DEFAULT_TOL_RANK,
};
pub use error::{Result, TwoIsoError};
pub use operator::{DefectReport, DefectValue, DegreeGrowth, MatrixDoc, Operator, OperatorDoc};
pub use reproduce::{reproduce, Check, ReproduceOptions, Reproduction, EXAMPLES};
pub use space::{BasisLabel, SpaceKind, Subspace, Vector, WeightedSpace, C64};
