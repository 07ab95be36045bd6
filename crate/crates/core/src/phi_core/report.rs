use std::fmt;

use crate::geometry::{Ball, PointCloud};
use crate::phi_core::ext_real::ExtReal;
use crate::phi_core::grid::TGrid;

/// Which condition a report is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConditionId {
    A0,
    A1,
    A1Omega,
    A2,
    AInc,
    ADec,
    WeakPhi,
    InverseAxioms,
    Equivalence,
    /// Chain length against the quasi-convex count bound.
    Chain,
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConditionId::A0 => "A0",
            ConditionId::A1 => "A1",
            ConditionId::A1Omega => "A1_Omega",
            ConditionId::A2 => "A2",
            ConditionId::AInc => "aInc",
            ConditionId::ADec => "aDec",
            ConditionId::WeakPhi => "weak_phi",
            ConditionId::InverseAxioms => "inverse_axioms",
            ConditionId::Equivalence => "equivalence",
            ConditionId::Chain => "chain",
        })
    }
}

/// How much of the quantified statement was actually exercised.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    /// Every lattice sample in range was tested.
    Checked,
    /// No lattice sample fell in the quantified range; the statement holds
    /// vacuously.
    Vacuous,
    /// Only grid nodes were available; continuity-type statements were not
    /// tested between them.
    GridOnly,
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coverage::Checked => "checked",
            Coverage::Vacuous => "vacuous",
            Coverage::GridOnly => "grid-only",
        })
    }
}

/// The lattice a verdict was computed on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    pub points: usize,
    pub grid_len: usize,
    pub t_min: f64,
    pub t_max: f64,
}

impl Lattice {
    pub fn new(points: usize, grid: &TGrid) -> Self {
        Lattice {
            points,
            grid_len: grid.len(),
            t_min: grid.min(),
            t_max: grid.max(),
        }
    }
}

/// Where the sharpest (or violating) sample occurred.
///
/// `lhs ≤ rhs` is the defining inequality evaluated at the witness with the
/// constant `tested_constant`; for a failed report `lhs > rhs · (1 + slack)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub points: Vec<Vec<f64>>,
    pub t: Vec<f64>,
    pub ball: Option<Ball>,
    pub tested_constant: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl Witness {
    pub fn new(points: Vec<Vec<f64>>, t: Vec<f64>) -> Self {
        Witness {
            points,
            t,
            ball: None,
            tested_constant: f64::NAN,
            lhs: f64::NAN,
            rhs: f64::NAN,
        }
    }

    pub fn at(cloud: &PointCloud, indices: &[usize], t: Vec<f64>) -> Self {
        Witness::new(indices.iter().map(|&i| cloud.point(i).to_vec()).collect(), t)
    }

    pub fn with_ball(mut self, ball: Ball) -> Self {
        self.ball = Some(ball);
        self
    }

    pub fn with_inequality(mut self, constant: f64, lhs: f64, rhs: f64) -> Self {
        self.tested_constant = constant;
        self.lhs = lhs;
        self.rhs = rhs;
        self
    }

    /// `lhs / rhs`; above `1 + slack` means the inequality is violated.
    pub fn violation(&self) -> f64 {
        if self.lhs == self.rhs {
            1.0
        } else {
            self.lhs / self.rhs
        }
    }
}

/// Verdict of one condition on one lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub condition: ConditionId,
    pub holds: bool,
    /// The extracted constant: β for (A0)/(A1)/(A1)_Ω/(A2), `a` for
    /// (aInc)/(aDec), `L` or `C` for equivalences.
    pub constant: ExtReal,
    pub witness: Option<Witness>,
    pub lattice: Lattice,
    pub coverage: Coverage,
    /// One-line summary of what was tested.
    pub detail: String,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn new(condition: ConditionId, holds: bool, constant: ExtReal, lattice: Lattice) -> Self {
        ConditionReport {
            condition,
            holds,
            constant,
            witness: None,
            lattice,
            coverage: Coverage::Checked,
            detail: String::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_witness(mut self, witness: Option<Witness>) -> Self {
        self.witness = witness;
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn with_coverage(mut self, coverage: Coverage) -> Self {
        self.coverage = coverage;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// `self` with `holds` cleared when `other` fails; notes are merged.
    pub(crate) fn and_also(mut self, other: &ConditionReport) -> Self {
        if !other.holds && self.holds {
            self.holds = false;
            self.witness = other.witness.clone();
        }
        self.notes.push(format!(
            "{} sub-check: {} ({})",
            other.condition,
            if other.holds { "holds" } else { "fails" },
            other.detail
        ));
        self
    }
}
