use rayon::prelude::*;

use crate::conditions::{estimate_adec, estimate_ainc};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::phi_core::phi::PhiFunction;
use crate::phi_core::report::{ConditionId, ConditionReport, Coverage, Lattice, Witness};
use crate::{ExtReal, SampledFunction, TGrid, SLACK};

/// Thresholds of [`check_weak_phi`].
#[derive(Clone, Debug, PartialEq)]
pub struct WeakPhiOptions {
    /// Limit proxies: `φ(x, t_min) ≤ limit_tol · r` and
    /// `φ(x, t_max) ≥ r / limit_tol` with `r = max(φ(x, 1), 1)` resp.
    /// `r = min(φ(x, 1), 1)` when positive.
    pub limit_tol: f64,
    /// Largest (aInc)₁ constant accepted.
    pub a_cap: f64,
    pub slack: f64,
}

impl Default for WeakPhiOptions {
    fn default() -> Self {
        WeakPhiOptions {
            limit_tol: 1e-3,
            a_cap: 10.0,
            slack: SLACK,
        }
    }
}

/// Checks the weak Φ-function axioms on `points × grid`: `φ(x, 0) = 0`,
/// monotonicity, the two limit proxies and (aInc)₁. The reported constant
/// is the (aInc)₁ constant `a`.
pub fn check_weak_phi(
    phi: &dyn PhiFunction,
    grid: &TGrid,
    points: &PointCloud,
    opts: &WeakPhiOptions,
) -> ConditionReport {
    let lattice = Lattice::new(points.len(), grid);
    let fail = |detail: String, w: Witness| {
        ConditionReport::new(ConditionId::WeakPhi, false, ExtReal::INFINITY, lattice)
            .with_witness(Some(w))
            .with_detail(detail)
    };
    let table = match SampledFunction::tabulate(phi, points, grid) {
        Ok(t) => t,
        Err(Error::NotANumber { x, t }) => {
            return fail(
                format!("evaluator returned NaN at t = {t}"),
                Witness::new(vec![x], vec![t]).with_inequality(1.0, f64::INFINITY, 0.0),
            )
        }
        Err(e) => {
            return fail(
                e.to_string(),
                Witness::new(vec![], vec![]).with_inequality(1.0, f64::INFINITY, 0.0),
            )
        }
    };
    let t = grid.samples();
    let one = grid.one_index();
    for (i, x) in points.iter().enumerate() {
        let v0 = phi.eval(x, 0.0);
        if v0 != 0.0 {
            return fail(
                format!("phi(x, 0) = {v0}"),
                Witness::at(points, &[i], vec![0.0]).with_inequality(1.0, v0, 0.0),
            );
        }
        let row = table.row(i);
        if let Some(j) = (1..row.len()).find(|&j| row[j - 1] > row[j] * (1.0 + opts.slack)) {
            return fail(
                format!("decreases between t = {} and t = {}", t[j - 1], t[j]),
                Witness::at(points, &[i], vec![t[j - 1], t[j]]).with_inequality(1.0, row[j - 1], row[j]),
            );
        }
        let at_one = row[one];
        let small_ref = if at_one.is_finite() { at_one.max(1.0) } else { 1.0 };
        let large_ref = if at_one > 0.0 { at_one.min(1.0) } else { 1.0 };
        if row[0] > opts.limit_tol * small_ref {
            return fail(
                format!("phi(x, {}) = {} does not tend to 0", t[0], row[0]),
                Witness::at(points, &[i], vec![t[0]]).with_inequality(opts.limit_tol, row[0], opts.limit_tol * small_ref),
            );
        }
        let last = row[row.len() - 1];
        if last < large_ref / opts.limit_tol {
            return fail(
                format!("phi(x, {}) = {last} does not tend to infinity", t[t.len() - 1]),
                Witness::at(points, &[i], vec![t[t.len() - 1]]).with_inequality(
                    opts.limit_tol,
                    large_ref / opts.limit_tol,
                    last,
                ),
            );
        }
    }
    let inc = match estimate_ainc(&table, 1.0, opts.a_cap) {
        Ok(r) => r,
        Err(e) => {
            return fail(
                e.to_string(),
                Witness::new(vec![], vec![]).with_inequality(1.0, f64::INFINITY, 0.0),
            )
        }
    };
    ConditionReport::new(ConditionId::WeakPhi, inc.holds, inc.constant, lattice)
        .with_witness(inc.witness.clone())
        .with_detail(format!("increasing, limit proxies pass, (aInc)_1 constant {}", inc.constant))
}

/// Checks that a table is the inverse of some weak Φ-function: increasing,
/// values in `(0, ∞)` on the grid (the sentinels give `f(0) = 0`,
/// `f(∞) = ∞`) and exact (Dec)₁ up to slack. Left-continuity can only be
/// seen on the grid and measurability is vacuous on finite samples; both are
/// recorded as such.
pub fn check_inverse_axioms(f: &SampledFunction) -> ConditionReport {
    let lattice = Lattice::new(f.n_points(), f.grid());
    let t = f.grid().samples();
    let fail = |detail: String, w: Witness| {
        ConditionReport::new(ConditionId::InverseAxioms, false, ExtReal::INFINITY, lattice)
            .with_witness(Some(w))
            .with_detail(detail)
    };
    for i in 0..f.n_points() {
        let row = f.row(i);
        if let Some(j) = row.iter().position(|v| *v == 0.0 || v.is_infinite()) {
            let v = row[j];
            let w = Witness::at(f.points(), &[i], vec![t[j]]);
            return fail(
                format!("f(x, {}) = {v} at an interior grid point", t[j]),
                if v == 0.0 {
                    w.with_inequality(1.0, f64::MIN_POSITIVE, 0.0)
                } else {
                    w.with_inequality(1.0, v, f64::MAX)
                },
            );
        }
        if let Some(j) = (1..row.len()).find(|&j| row[j - 1] > row[j] * (1.0 + SLACK)) {
            return fail(
                format!("decreases between t = {} and t = {}", t[j - 1], t[j]),
                Witness::at(f.points(), &[i], vec![t[j - 1], t[j]]).with_inequality(1.0, row[j - 1], row[j]),
            );
        }
    }
    let dec = match estimate_adec(f, 1.0, 1.0 + SLACK) {
        Ok(r) => r,
        Err(e) => {
            return fail(
                e.to_string(),
                Witness::new(vec![], vec![]).with_inequality(1.0, f64::INFINITY, 0.0),
            )
        }
    };
    ConditionReport::new(ConditionId::InverseAxioms, dec.holds, dec.constant, lattice)
        .with_witness(dec.witness.clone())
        .with_coverage(Coverage::GridOnly)
        .with_detail(format!("increasing, positive and finite, (aDec)_1 constant {}", dec.constant))
        .note("left-continuity: checked on grid")
        .note("measurability in x: vacuous on finite samples")
}

/// Smallest `L ∈ [1, L_max]` with `φ(x, t/L) ≤ ψ(x, t) ≤ φ(x, Lt)` and
/// `ψ(x, t/L) ≤ φ(x, t) ≤ ψ(x, Lt)` at every sample, by bisection in
/// `ln L`. Checking both sandwiches makes the result symmetric in `φ, ψ`.
pub fn equivalence_constant(
    phi: &dyn PhiFunction,
    psi: &dyn PhiFunction,
    grid: &TGrid,
    points: &PointCloud,
    l_max: f64,
) -> Result<ConditionReport> {
    if phi.dimension() != psi.dimension() {
        return Err(Error::Config(format!(
            "dimensions differ: {} vs {}",
            phi.dimension(),
            psi.dimension()
        )));
    }
    if !(l_max >= 1.0) {
        return Err(Error::Config(format!("L_max = {l_max} must be at least 1")));
    }
    let lattice = Lattice::new(points.len(), grid);
    let fa = SampledFunction::tabulate(phi, points, grid)?;
    let fb = SampledFunction::tabulate(psi, points, grid)?;
    let t = grid.samples();

    // first violation at L, as (point, node, lhs, rhs)
    let violation = |l: f64| -> Option<(usize, usize, f64, f64)> {
        (0..points.len())
            .into_par_iter()
            .find_map_first(|i| {
                let x = points.point(i);
                for (j, &s) in t.iter().enumerate() {
                    let (a, b) = (fa.value(i, j), fb.value(i, j));
                    let checks = [
                        (phi.eval(x, s / l), b),
                        (b, phi.eval(x, l * s)),
                        (psi.eval(x, s / l), a),
                        (a, psi.eval(x, l * s)),
                    ];
                    for (lhs, rhs) in checks {
                        if lhs > rhs * (1.0 + SLACK) {
                            return Some((i, j, lhs, rhs));
                        }
                    }
                }
                None
            })
    };

    if let Some((i, j, lhs, rhs)) = violation(l_max) {
        return Ok(ConditionReport::new(ConditionId::Equivalence, false, ExtReal::INFINITY, lattice)
            .with_witness(Some(Witness::at(points, &[i], vec![t[j]]).with_inequality(l_max, lhs, rhs)))
            .with_detail(format!("no L <= {l_max} satisfies the sandwich")));
    }
    let l = if violation(1.0).is_none() {
        1.0
    } else {
        let (mut lo, mut hi) = (0.0f64, l_max.ln());
        while hi - lo > 1e-7 {
            let mid = 0.5 * (lo + hi);
            if violation(mid.exp()).is_some() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi.exp()
    };
    Ok(ConditionReport::new(ConditionId::Equivalence, true, ExtReal::clamped(l), lattice)
        .with_detail(format!("equivalent with L = {l:.6}")))
}

/// Smallest `C ≥ 1` with `f_A ≤ C f_B` and `f_B ≤ C f_A` on the common
/// lattice. `0/0` and `∞/∞` count as 1; a lone `0` or `∞` fails.
pub fn inverse_comparability(fa: &SampledFunction, fb: &SampledFunction) -> Result<ConditionReport> {
    if fa.n_points() != fb.n_points() || fa.grid() != fb.grid() {
        return Err(Error::Config("tables live on different lattices".into()));
    }
    let lattice = Lattice::new(fa.n_points(), fa.grid());
    let t = fa.grid().samples();
    let m = t.len();
    let mut c = 1.0f64;
    let mut at = None;
    for (k, (&a, &b)) in fa.values().iter().zip(fb.values()).enumerate() {
        if a == b {
            continue;
        }
        let r = if a == 0.0 || b == 0.0 || a.is_infinite() || b.is_infinite() {
            f64::INFINITY
        } else {
            (a / b).max(b / a)
        };
        if r > c {
            c = r;
            at = Some((k / m, k % m, a, b));
        }
        if r == f64::INFINITY {
            break;
        }
    }
    let holds = c.is_finite();
    let witness = at.map(|(i, j, a, b)| {
        let (big, small) = if a > b { (a, b) } else { (b, a) };
        let w = Witness::at(fa.points(), &[i], vec![t[j]]);
        if holds {
            w.with_inequality(c, big, c * small)
        } else if small == 0.0 {
            // fails for every finite C
            w.with_inequality(1.0, big, 0.0)
        } else {
            w.with_inequality(1.0, big, small)
        }
    });
    Ok(ConditionReport::new(ConditionId::Equivalence, holds, ExtReal::clamped(c), lattice)
        .with_witness(witness)
        .with_detail(format!("cross-ratio bound C = {c:.6e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi_core::phi::FnPhi;

    fn one_point() -> PointCloud {
        PointCloud::from_points(1, &[[0.0]]).unwrap()
    }

    #[test]
    fn identity_is_a_weak_phi() {
        let r = check_weak_phi(&FnPhi::of_t(1, "t", |t| t), &TGrid::default(), &one_point(), &WeakPhiOptions::default());
        assert!(r.holds);
        assert_eq!(r.constant.value(), 1.0);
    }

    #[test]
    fn bounded_function_fails_the_limit_proxy() {
        let r = check_weak_phi(
            &FnPhi::of_t(1, "min(t,1)", |t| t.min(1.0)),
            &TGrid::default(),
            &one_point(),
            &WeakPhiOptions::default(),
        );
        assert!(!r.holds);
        assert!(r.detail.contains("infinity"));
        assert!(r.witness.unwrap().violation() > 1.0);
    }

    #[test]
    fn inverse_axioms() {
        let g = TGrid::default();
        let sqrt = SampledFunction::tabulate(&FnPhi::of_t(1, "sqrt", |t| t.sqrt()), &one_point(), &g).unwrap();
        assert!(check_inverse_axioms(&sqrt).holds);
        let sq = SampledFunction::tabulate(&FnPhi::of_t(1, "sq", |t| t * t), &one_point(), &g).unwrap();
        assert!(!check_inverse_axioms(&sq).holds);
    }

    #[test]
    fn equivalence_of_scaled_square() {
        let g = TGrid::geometric(1e-3, 1e3, 121).unwrap();
        let phi = FnPhi::of_t(1, "t^2", |t| t * t);
        let psi = FnPhi::of_t(1, "4t^2", |t| 4.0 * t * t);
        let r = equivalence_constant(&phi, &psi, &g, &one_point(), 100.0).unwrap();
        assert!((r.constant.value() - 2.0).abs() < 1e-6, "{r:?}");
        let back = equivalence_constant(&psi, &phi, &g, &one_point(), 100.0).unwrap();
        assert_eq!(r.constant, back.constant);
        let same = equivalence_constant(&phi, &phi, &g, &one_point(), 100.0).unwrap();
        assert_eq!(same.constant.value(), 1.0);
    }

    #[test]
    fn comparability_conventions() {
        let g = TGrid::geometric(0.5, 2.0, 3).unwrap();
        let c = one_point();
        let a = SampledFunction::new(c.clone(), g.clone(), vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(inverse_comparability(&a, &a).unwrap().constant.value(), 1.0);
        assert_eq!(inverse_comparability(&a, &a.scaled(3.0)).unwrap().constant.value(), 3.0);
        let z = SampledFunction::new(c, g, vec![0.0, 2.0, 3.0]).unwrap();
        let r = inverse_comparability(&a, &z).unwrap();
        assert!(!r.holds && r.witness.unwrap().violation() > 1.0);
    }
}
