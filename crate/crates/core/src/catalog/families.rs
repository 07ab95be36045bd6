//! Built-in Φ-function families.

use std::fmt;
use std::sync::Arc;

use super::csv::{read_grid_csv, TablePhi};
use super::fields::Field;
use crate::error::{Error, Result};
use crate::phi_core::phi::{PhiFunction, SharedPhi};

/// Family id plus parameters, as written in a scenario.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    /// `t^p`.
    Power { p: f64 },
    /// `t^{p(x)}`.
    VariableExponent { p: Field },
    /// `t^p + a(x) t^q`.
    DoublePhase { p: f64, q: f64, a: Field },
    /// `t log(e + t)`.
    LLogL,
    /// `w(x) t^p`.
    WeightedPower { p: f64, w: Field },
    /// A grid CSV file read back as a table.
    Table { path: String },
}

impl FamilySpec {
    pub fn id(&self) -> &'static str {
        match self {
            FamilySpec::Power { .. } => "power",
            FamilySpec::VariableExponent { .. } => "variable_exponent",
            FamilySpec::DoublePhase { .. } => "double_phase",
            FamilySpec::LLogL => "llogl",
            FamilySpec::WeightedPower { .. } => "weighted_power",
            FamilySpec::Table { .. } => "table",
        }
    }

    pub fn fields(&self) -> Vec<&Field> {
        match self {
            FamilySpec::VariableExponent { p } => vec![p],
            FamilySpec::DoublePhase { a, .. } => vec![a],
            FamilySpec::WeightedPower { w, .. } => vec![w],
            _ => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match self {
            FamilySpec::Power { p } if !(*p >= 1.0 && p.is_finite()) => bad(format!("power: p = {p} must be >= 1")),
            FamilySpec::VariableExponent { p } => {
                let (lo, hi) = p.bounds();
                if lo < 1.0 || !hi.is_finite() {
                    return bad(format!("variable_exponent: p(x) ranges over [{lo}, {hi}], needs [1, inf)"));
                }
                Ok(())
            }
            FamilySpec::DoublePhase { p, q, a } => {
                if !(*p >= 1.0) || !(q >= p) || !q.is_finite() {
                    return bad(format!("double_phase: need 1 <= p <= q < inf (got p = {p}, q = {q})"));
                }
                if a.bounds().0 < 0.0 {
                    return bad("double_phase: coefficient a(x) must be >= 0".into());
                }
                Ok(())
            }
            FamilySpec::WeightedPower { p, w } => {
                if !(*p >= 1.0 && p.is_finite()) {
                    return bad(format!("weighted_power: p = {p} must be >= 1"));
                }
                if !(w.bounds().0 > 0.0) {
                    return bad("weighted_power: weight w(x) must be bounded below by a positive constant".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Power { p } => write!(f, "power p={p}"),
            FamilySpec::VariableExponent { p } => write!(f, "variable_exponent p={p}"),
            FamilySpec::DoublePhase { p, q, a } => write!(f, "double_phase p={p} q={q} a={a}"),
            FamilySpec::LLogL => f.write_str("llogl"),
            FamilySpec::WeightedPower { p, w } => write!(f, "weighted_power p={p} w={w}"),
            FamilySpec::Table { path } => write!(f, "table path={path}"),
        }
    }
}

/// Evaluator of a built-in family in dimension `dim`.
#[derive(Clone, Debug)]
pub struct Family {
    spec: FamilySpec,
    dim: usize,
}

impl Family {
    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }
}

/// Builds the evaluator for `spec`. Table families read their file here.
pub fn make_family(spec: &FamilySpec, dim: usize) -> Result<SharedPhi> {
    spec.validate()?;
    for field in spec.fields() {
        field.check_dim(dim).map_err(Error::Config)?;
    }
    if let FamilySpec::Table { path } = spec {
        let table = read_grid_csv(path)?;
        if table.points().dim() != dim {
            return Err(Error::Config(format!(
                "table {path} has dimension {}, domain has {dim}",
                table.points().dim()
            )));
        }
        return Ok(Arc::new(TablePhi::new(table, format!("table({path})"))));
    }
    Ok(Arc::new(Family { spec: spec.clone(), dim }))
}

impl PhiFunction for Family {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64], t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.spec {
            FamilySpec::Power { p } => t.powf(*p),
            FamilySpec::VariableExponent { p } => t.powf(p.eval(x)),
            FamilySpec::DoublePhase { p, q, a } => {
                let c = a.eval(x);
                let tail = if c == 0.0 { 0.0 } else { c * t.powf(*q) };
                t.powf(*p) + tail
            }
            FamilySpec::LLogL => {
                if t == f64::INFINITY {
                    t
                } else {
                    t * (std::f64::consts::E + t).ln()
                }
            }
            FamilySpec::WeightedPower { p, w } => w.eval(x) * t.powf(*p),
            FamilySpec::Table { .. } => unreachable!("tables are built as TablePhi"),
        }
    }

    fn declared_ainc(&self) -> Option<f64> {
        match &self.spec {
            FamilySpec::Power { p } | FamilySpec::WeightedPower { p, .. } | FamilySpec::DoublePhase { p, .. } => Some(*p),
            FamilySpec::VariableExponent { p } => Some(p.bounds().0),
            FamilySpec::LLogL => Some(1.0),
            FamilySpec::Table { .. } => None,
        }
    }

    fn declared_adec(&self) -> Option<f64> {
        match &self.spec {
            FamilySpec::Power { p } | FamilySpec::WeightedPower { p, .. } => Some(*p),
            FamilySpec::DoublePhase { q, a, p } => Some(if a.bounds().1 == 0.0 { *p } else { *q }),
            FamilySpec::VariableExponent { p } => Some(p.bounds().1),
            // t log(e+t) has t φ'/φ = 1 + t / ((e+t) log(e+t)) <= 2
            FamilySpec::LLogL => Some(2.0),
            FamilySpec::Table { .. } => None,
        }
    }

    fn is_spatial(&self) -> bool {
        match &self.spec {
            FamilySpec::Power { .. } | FamilySpec::LLogL => false,
            FamilySpec::VariableExponent { p } => !p.is_constant(),
            FamilySpec::DoublePhase { a, .. } => !a.is_constant(),
            FamilySpec::WeightedPower { w, .. } => !w.is_constant(),
            FamilySpec::Table { .. } => true,
        }
    }

    fn analytic_inverse(&self, x: &[f64], tau: f64) -> Option<f64> {
        match &self.spec {
            FamilySpec::Power { p } => Some(tau.powf(1.0 / p)),
            FamilySpec::VariableExponent { p } => Some(tau.powf(1.0 / p.eval(x))),
            FamilySpec::WeightedPower { p, w } => Some((tau / w.eval(x)).powf(1.0 / p)),
            FamilySpec::DoublePhase { p, a, .. } if a.eval(x) == 0.0 => Some(tau.powf(1.0 / p)),
            _ => None,
        }
    }

    fn label(&self) -> String {
        self.spec.to_string()
    }
}
