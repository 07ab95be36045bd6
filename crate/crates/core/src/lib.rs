//! Generalized weak Φ-functions on sampled domains.
//!
//! A [`PhiFunction`] is an evaluator `φ(x, t)` with values in `[0, ∞]`.
//! Everything in this crate works on a finite lattice: a point cloud standing
//! in for the domain Ω and a [`TGrid`] standing in for the `t`-axis.
//!
//! The crate is organised as
//!
//! * [`phi_core`]: extended reals, grids, evaluators, left-inversion,
//!   equivalence and the axiom checkers;
//! * [`conditions`]: (A0), (A1), (A1)_Ω, (A2) and the (aInc)/(aDec)
//!   estimators;
//! * [`geometry`]: point clouds, balls, chains and quasi-convexity;
//! * [`extension`]: the `f → g → ψ` extension pipeline and its certificate;
//! * [`catalog`]: built-in families and domains, scenario files, reports,
//!   CSV output and the scenario runner used by the CLI.

pub mod catalog;
pub mod conditions;
pub mod error;
pub mod extension;
pub mod geometry;
pub mod phi_core;

pub use error::{Error, Result};
pub use phi_core::ext_real::ExtReal;
pub use phi_core::grid::TGrid;
pub use phi_core::phi::{PhiFunction, SharedPhi};
pub use phi_core::report::{ConditionId, ConditionReport, Coverage, Witness};
pub use phi_core::sampled::SampledFunction;

/// Relative tolerance of every bisection.
pub const BISECTION_TOL: f64 = 1e-9;
/// Iteration cap of every bisection.
pub const BISECTION_MAX_ITER: usize = 200;
/// Multiplicative slack accepted before an inequality counts as violated.
pub const SLACK: f64 = 1e-7;
