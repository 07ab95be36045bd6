use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::conditions::CheckOptions;
use crate::error::{Error, Result};
use crate::geometry::SpatialDomain;
use crate::phi_core::inverse::inverse_table;
use crate::phi_core::phi::{PhiFunction, SharedPhi};
use crate::phi_core::report::{ConditionId, ConditionReport, Coverage, Lattice, Witness};
use crate::{ExtReal, TGrid};

pub type HFunction = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Data of (A2): the limit function `φ_∞`, the error term `h`, the upper
/// end `s` of the interval form and the candidate constant `β₂`.
///
/// `value_threshold` restricts the (A2′) inequalities to small values:
/// `φ_∞(t) ≤ value_threshold` resp. `φ(x, t) ≤ value_threshold`. The
/// extension uses the (A0) constant `β₀` here.
#[derive(Clone)]
pub struct A2Inputs {
    pub phi_infinity: SharedPhi,
    /// `None` fits the canonical `h` from the data.
    pub h: Option<HFunction>,
    pub s_threshold: f64,
    pub beta2: f64,
    pub value_threshold: f64,
}

impl fmt::Debug for A2Inputs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("A2Inputs")
            .field("phi_infinity", &self.phi_infinity.label())
            .field("h", &self.h.as_ref().map(|_| "<fn>"))
            .field("s_threshold", &self.s_threshold)
            .field("beta2", &self.beta2)
            .field("value_threshold", &self.value_threshold)
            .finish()
    }
}

impl A2Inputs {
    pub fn new(phi_infinity: SharedPhi) -> Self {
        A2Inputs {
            phi_infinity,
            h: None,
            s_threshold: 1.0,
            beta2: 1.0,
            value_threshold: 1.0,
        }
    }

    pub fn with_h(mut self, h: HFunction) -> Self {
        self.h = Some(h);
        self
    }

    pub fn with_beta2(mut self, beta2: f64) -> Self {
        self.beta2 = beta2;
        self
    }

    pub fn with_s_threshold(mut self, s: f64) -> Self {
        self.s_threshold = s;
        self
    }

    pub fn with_value_threshold(mut self, v: f64) -> Self {
        self.value_threshold = v;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta2 > 0.0 && self.beta2 <= 1.0) {
            return Err(Error::Config(format!("beta2 = {} is not in (0, 1]", self.beta2)));
        }
        if !(self.s_threshold > 0.0) || !self.s_threshold.is_finite() {
            return Err(Error::Config(format!("s = {} must be positive and finite", self.s_threshold)));
        }
        if !(self.value_threshold > 0.0) {
            return Err(Error::Config(format!(
                "value threshold {} must be positive",
                self.value_threshold
            )));
        }
        if self.phi_infinity.is_spatial() {
            return Err(Error::Config(format!(
                "phi_infinity ({}) must not depend on x",
                self.phi_infinity.label()
            )));
        }
        Ok(())
    }
}

/// Outcome of [`check_a2`] with the coverage of each half kept apart.
#[derive(Clone, Debug)]
pub struct A2Check {
    pub report: ConditionReport,
    /// Coverage of the (A2′) inequalities.
    pub prime: Coverage,
    /// Coverage of the interval form; `None` when `h` was fitted.
    pub interval: Option<Coverage>,
    /// `h` at each cloud point.
    pub h: Vec<f64>,
    pub h_sup: f64,
    /// `Σ h(x) w(x)` with the domain's measure weights.
    pub h_l1: f64,
}

struct Violation {
    ratio: f64,
    point: usize,
    other: Option<usize>,
    t: f64,
    lhs: f64,
    rhs: f64,
}

fn worse(a: Option<Violation>, b: Option<Violation>) -> Option<Violation> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.ratio > a.ratio { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

fn excess(lhs: f64, rhs: f64) -> f64 {
    if lhs == rhs {
        1.0
    } else {
        lhs / rhs
    }
}

/// (A2) through the (A2′) inequalities
/// `φ(x, β₂t) ≤ φ_∞(t) + h(x)` (where `φ_∞(t) ≤ threshold`) and
/// `φ_∞(β₂t) ≤ φ(x, t) + h(x)` (where `φ(x, t) ≤ threshold`).
///
/// With a supplied `h` the interval form
/// `β₂ φ⁻¹(x, t) ≤ φ⁻¹(y, t)` for `t ∈ [h(x) + h(y), s]` is checked too,
/// and an empty interval is reported as vacuous. Without `h`, the smallest
/// `h` making (A2′) hold is fitted and its boundedness is the verdict.
pub fn check_a2(
    phi: &dyn PhiFunction,
    domain: &SpatialDomain,
    inputs: &A2Inputs,
    grid: &TGrid,
    opts: &CheckOptions,
) -> Result<A2Check> {
    inputs.validate()?;
    let cloud = domain.cloud();
    let t = grid.samples();
    let b2 = inputs.beta2;
    let thr = inputs.value_threshold;
    let phi_inf = &inputs.phi_infinity;
    let origin = vec![0.0; cloud.dim()];
    let inf_t: Vec<f64> = t.iter().map(|&s| phi_inf.eval(&origin, s)).collect();
    let inf_bt: Vec<f64> = t.iter().map(|&s| phi_inf.eval(&origin, b2 * s)).collect();
    if let Some(j) = inf_t.iter().chain(&inf_bt).position(|v| v.is_nan()) {
        return Err(Error::NotANumber {
            x: origin,
            t: t[j % t.len()],
        });
    }

    // per point: φ(x, t) and φ(x, β₂ t) on the grid
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..cloud.len())
        .into_par_iter()
        .map(|i| {
            let x = cloud.point(i);
            (
                t.iter().map(|&s| phi.eval(x, s)).collect(),
                t.iter().map(|&s| phi.eval(x, b2 * s)).collect(),
            )
        })
        .collect();
    for (i, (a, b)) in rows.iter().enumerate() {
        if let Some(j) = a.iter().chain(b).position(|v| v.is_nan()) {
            return Err(Error::NotANumber {
                x: cloud.point(i).to_vec(),
                t: t[j % t.len()],
            });
        }
    }

    let h: Vec<f64> = match &inputs.h {
        Some(hf) => {
            let h: Vec<f64> = cloud.iter().map(|x| hf(x)).collect();
            if let Some(i) = h.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::Config(format!(
                    "h({:?}) = {} is not a finite nonnegative number",
                    cloud.point(i),
                    h[i]
                )));
            }
            h
        }
        None => rows
            .iter()
            .map(|(at_t, at_bt)| {
                let mut h = 0.0f64;
                for j in 0..t.len() {
                    if inf_t[j] <= thr {
                        h = h.max(at_bt[j] - inf_t[j]);
                    }
                    if at_t[j] <= thr {
                        h = h.max(inf_bt[j] - at_t[j]);
                    }
                }
                h
            })
            .collect(),
    };
    let h_sup = h.iter().copied().fold(0.0, f64::max);
    let h_l1: f64 = h.iter().zip(domain.weights()).map(|(h, w)| h * w).sum();

    let mut prime_samples = 0usize;
    let mut worst: Option<Violation> = None;
    for (i, (at_t, at_bt)) in rows.iter().enumerate() {
        for j in 0..t.len() {
            if inf_t[j] <= thr {
                prime_samples += 1;
                let (lhs, rhs) = (at_bt[j], inf_t[j] + h[i]);
                let r = excess(lhs, rhs);
                if r > 1.0 + opts.slack {
                    worst = worse(worst, Some(Violation { ratio: r, point: i, other: None, t: t[j], lhs, rhs }));
                }
            }
            if at_t[j] <= thr {
                prime_samples += 1;
                let (lhs, rhs) = (inf_bt[j], at_t[j] + h[i]);
                let r = excess(lhs, rhs);
                if r > 1.0 + opts.slack {
                    worst = worse(worst, Some(Violation { ratio: r, point: i, other: None, t: t[j], lhs, rhs }));
                }
            }
        }
    }
    let prime = if prime_samples == 0 {
        Coverage::Vacuous
    } else {
        Coverage::Checked
    };

    let mut interval = None;
    let mut interval_samples = 0usize;
    if inputs.h.is_some() {
        let nodes: Vec<usize> = (0..t.len()).filter(|&j| t[j] <= inputs.s_threshold).collect();
        let h_min = h.iter().copied().fold(f64::INFINITY, f64::min);
        let live: Vec<usize> = nodes.into_iter().filter(|&j| t[j] >= 2.0 * h_min).collect();
        if !live.is_empty() {
            let sub = TGrid::from_samples(with_one(live.iter().map(|&j| t[j]).collect()))?;
            let inv = inverse_table(phi, cloud, &sub, opts.tol)?;
            let mut order: Vec<usize> = (0..cloud.len()).collect();
            order.sort_by(|&a, &b| h[a].total_cmp(&h[b]).then(a.cmp(&b)));
            let hs: Vec<f64> = order.iter().map(|&i| h[i]).collect();
            for (k, &s) in sub.samples().iter().enumerate() {
                if !live.iter().any(|&j| t[j] == s) {
                    continue;
                }
                let mut pm = Vec::with_capacity(order.len());
                let mut m = (f64::INFINITY, 0usize);
                for &i in &order {
                    let v = inv.value(i, k);
                    if v < m.0 {
                        m = (v, i);
                    }
                    pm.push(m);
                }
                for x in 0..cloud.len() {
                    let c = hs.partition_point(|&hy| hy <= s - h[x]);
                    if c == 0 {
                        continue;
                    }
                    interval_samples += 1;
                    let (vy, y) = pm[c - 1];
                    let lhs = b2 * inv.value(x, k);
                    let r = excess(lhs, vy);
                    if r > 1.0 + opts.slack {
                        worst = worse(worst, Some(Violation { ratio: r, point: x, other: Some(y), t: s, lhs, rhs: vy }));
                    }
                }
            }
        }
        interval = Some(if interval_samples == 0 {
            Coverage::Vacuous
        } else {
            Coverage::Checked
        });
    }

    let bounded_h = h_sup.is_finite() && h_l1.is_finite();
    let holds = worst.is_none() && bounded_h;
    let coverage = match (prime, interval) {
        (Coverage::Vacuous, None | Some(Coverage::Vacuous)) => Coverage::Vacuous,
        _ => Coverage::Checked,
    };
    let witness = worst.map(|v| {
        let mut idx = vec![v.point];
        idx.extend(v.other);
        Witness::at(cloud, &idx, vec![v.t]).with_inequality(b2, v.lhs, v.rhs)
    });
    let mut report = ConditionReport::new(
        ConditionId::A2,
        holds,
        ExtReal::clamped(if holds { b2 } else { 0.0 }),
        Lattice::new(cloud.len(), grid),
    )
    .with_witness(witness)
    .with_coverage(coverage)
    .with_detail(format!(
        "beta2 = {b2}, h {} with sup {h_sup:.6e} and weighted sum {h_l1:.6e}",
        if inputs.h.is_some() { "supplied" } else { "fitted" }
    ))
    .note(format!("(A2') form: {prime}, {prime_samples} samples below threshold {thr}"));
    report = match interval {
        Some(c) => report.note(format!(
            "interval form up to s = {}: {c}, {interval_samples} samples",
            inputs.s_threshold
        )),
        None => report.note("interval form: skipped (h fitted)"),
    };
    Ok(A2Check {
        report,
        prime,
        interval,
        h,
        h_sup,
        h_l1,
    })
}

/// A grid must contain 1; add it when the selected nodes miss it.
fn with_one(mut samples: Vec<f64>) -> Vec<f64> {
    if !samples.contains(&1.0) {
        samples.push(1.0);
        samples.sort_by(f64::total_cmp);
    }
    samples
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PointCloud;
    use crate::phi_core::phi::FnPhi;

    fn square() -> SpatialDomain {
        let pts: Vec<[f64; 2]> = (0..25).map(|i| [(i % 5) as f64 / 4.0, (i / 5) as f64 / 4.0]).collect();
        SpatialDomain::new(PointCloud::from_points(2, &pts).unwrap(), true).unwrap()
    }

    #[test]
    fn interval_form_is_vacuous_when_h_equals_s() {
        let phi = FnPhi::new(2, "t^2", |_, t| t * t);
        let inputs = A2Inputs::new(FnPhi::of_t(2, "t^2", |t| t * t).shared())
            .with_s_threshold(0.5)
            .with_h(Arc::new(|_| 0.5));
        let c = check_a2(&phi, &square(), &inputs, &TGrid::default(), &CheckOptions::default()).unwrap();
        assert!(c.report.holds);
        assert_eq!(c.interval, Some(Coverage::Vacuous));
        assert_eq!(c.prime, Coverage::Checked);
    }

    #[test]
    fn infinite_h_is_a_configuration_error() {
        let phi = FnPhi::new(2, "t^2", |_, t| t * t);
        let inputs = A2Inputs::new(FnPhi::of_t(2, "t^2", |t| t * t).shared()).with_h(Arc::new(|_| f64::INFINITY));
        assert!(matches!(
            check_a2(&phi, &square(), &inputs, &TGrid::default(), &CheckOptions::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn growth_mismatch_fails_with_supplied_h() {
        let phi = FnPhi::new(2, "t^2", |_, t| t * t);
        let inputs = A2Inputs::new(FnPhi::of_t(2, "t^3", |t| t * t * t).shared()).with_h(Arc::new(|_| 1e-3));
        let c = check_a2(&phi, &square(), &inputs, &TGrid::default(), &CheckOptions::default()).unwrap();
        assert!(!c.report.holds);
        assert!(c.report.witness.unwrap().violation() > 1.0);
    }

    #[test]
    fn fitted_h_is_bounded() {
        let phi = FnPhi::new(2, "t^2", |_, t| t * t);
        let inputs = A2Inputs::new(FnPhi::of_t(2, "t^3", |t| t * t * t).shared());
        let c = check_a2(&phi, &square(), &inputs, &TGrid::default(), &CheckOptions::default()).unwrap();
        assert!(c.report.holds);
        // max of t^2 − t^3 on {t^3 ≤ 1} is 4/27 at t = 2/3
        assert!((c.h_sup - 4.0 / 27.0).abs() < 1e-3);
    }
}
