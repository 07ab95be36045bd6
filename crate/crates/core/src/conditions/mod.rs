//! Verifiers and constant extractors for (A0), (A1), (A1)_Ω, (A2) and the
//! growth conditions (aInc)_p, (aDec)_q.
//!
//! Every check runs on a finite lattice and is strictly stronger than the
//! almost-everywhere statement it stands in for.

mod a0;
mod a1;
mod a2;
mod growth;

pub use a0::{check_a0, check_a0_table};
pub use a1::{
    check_a1, check_a1_omega, check_a1_omega_table, check_a1_table, sample_balls,
};
pub use a2::{check_a2, A2Check, A2Inputs, HFunction};
pub use growth::{
    estimate_adec, estimate_adec_phi, estimate_ainc, estimate_ainc_phi, exponent_range,
    exponent_range_table, ExponentRange,
};

use crate::{BISECTION_TOL, SLACK};

/// Knobs shared by the condition checks.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOptions {
    /// Relative tolerance of left-inversion.
    pub tol: f64,
    /// Multiplicative slack before an inequality counts as violated.
    pub slack: f64,
    /// Largest (aInc)/(aDec) constant accepted as "holds".
    pub a_cap: f64,
    /// Number of balls sampled by (A1).
    pub ball_budget: usize,
    pub seed: u64,
    /// (A1) and (A1)_Ω fail when β over the full grid drops below
    /// `(1 − drift_tol)` times β over `t ≤ √t_max`.
    pub drift_tol: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tol: BISECTION_TOL,
            slack: SLACK,
            a_cap: 10.0,
            ball_budget: 256,
            seed: 0,
            drift_tol: 0.25,
        }
    }
}
