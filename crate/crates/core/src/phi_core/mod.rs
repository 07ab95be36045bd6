//! Core types: extended reals, the `t`-grid, Φ-function evaluators,
//! left-inversion, sampled tables and condition reports.

pub mod axioms;
pub mod ext_real;
pub mod grid;
pub mod inverse;
pub mod phi;
pub mod report;
pub mod sampled;

pub use axioms::{
    check_inverse_axioms, check_weak_phi, equivalence_constant, inverse_comparability,
    WeakPhiOptions,
};
pub use inverse::{inverse_table, left_inverse};
