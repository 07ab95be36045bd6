use crate::conditions::CheckOptions;
use crate::error::Result;
use crate::geometry::SpatialDomain;
use crate::phi_core::inverse::left_inverse;
use crate::phi_core::phi::PhiFunction;
use crate::phi_core::report::{ConditionId, ConditionReport, Lattice, Witness};
use crate::{ExtReal, SampledFunction, TGrid};

/// (A0): `β ≤ φ⁻¹(x, 1) ≤ 1/β` with `β₀ = min(min v, 1/max v)` clamped to
/// `(0, 1]`, where `v(x) = φ⁻¹(x, 1)`.
pub fn check_a0(
    phi: &dyn PhiFunction,
    domain: &SpatialDomain,
    grid: &TGrid,
    opts: &CheckOptions,
) -> Result<ConditionReport> {
    let cloud = domain.cloud();
    let values = cloud
        .iter()
        .map(|x| left_inverse(phi, x, ExtReal::ONE, opts.tol).map(f64::from))
        .collect::<Result<Vec<_>>>()?;
    Ok(a0_from_values(cloud, &values, Lattice::new(cloud.len(), grid)))
}

/// (A0) read off the `τ = 1` column of an inverse table.
pub fn check_a0_table(inverse: &SampledFunction) -> ConditionReport {
    let lattice = Lattice::new(inverse.n_points(), inverse.grid());
    a0_from_values(inverse.points(), &inverse.at_one(), lattice)
}

fn a0_from_values(
    cloud: &crate::geometry::PointCloud,
    values: &[f64],
    lattice: Lattice,
) -> ConditionReport {
    let (mut lo, mut lo_at) = (f64::INFINITY, 0);
    let (mut hi, mut hi_at) = (0.0f64, 0);
    for (i, &v) in values.iter().enumerate() {
        if v < lo {
            lo = v;
            lo_at = i;
        }
        if v > hi {
            hi = v;
            hi_at = i;
        }
    }
    let holds = lo > 0.0 && hi < f64::INFINITY;
    let beta = lo.min(1.0 / hi).min(1.0);
    // the binding side: lower bound β ≤ v or upper bound v ≤ 1/β
    let lower_binds = lo <= 1.0 / hi;
    let (at, v) = if lower_binds { (lo_at, lo) } else { (hi_at, hi) };
    let witness = if holds {
        let w = Witness::at(cloud, &[at], vec![1.0]);
        Some(if lower_binds {
            w.with_inequality(beta, beta, v)
        } else {
            w.with_inequality(beta, v * beta, 1.0)
        })
    } else {
        // no positive β works: v = 0 breaks β ≤ v, v = ∞ breaks β v ≤ 1
        let w = Witness::at(cloud, &[at], vec![1.0]);
        Some(if v == 0.0 {
            w.with_inequality(f64::MIN_POSITIVE, f64::MIN_POSITIVE, 0.0)
        } else {
            w.with_inequality(f64::MIN_POSITIVE, f64::INFINITY, 1.0)
        })
    };
    ConditionReport::new(ConditionId::A0, holds, ExtReal::clamped(if holds { beta } else { 0.0 }), lattice)
        .with_witness(witness)
        .with_detail(format!("phi^-1(x, 1) ranges over [{lo:.6e}, {hi:.6e}]"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PointCloud;
    use crate::phi_core::phi::FnPhi;

    fn domain() -> SpatialDomain {
        let c = PointCloud::from_points(1, &[[0.0], [0.5], [1.0]]).unwrap();
        SpatialDomain::new(c, true).unwrap()
    }

    #[test]
    fn weighted_square() {
        // c(x) ∈ [1/2, 2]: φ⁻¹(x, 1) = c^{-1/2}
        let phi = FnPhi::new(1, "c t^2", |x, t| 2f64.powf(2.0 * x[0] - 1.0) * t * t);
        let r = check_a0(&phi, &domain(), &TGrid::default(), &CheckOptions::default()).unwrap();
        assert!(r.holds);
        assert!((r.constant.value() - 0.5f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn infinite_inverse_fails() {
        let phi = FnPhi::new(1, "degenerate", |x, t| if x[0] > 0.9 { 0.5 * t.min(1.0) } else { t });
        let r = check_a0(&phi, &domain(), &TGrid::default(), &CheckOptions::default()).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert_eq!(w.points[0], vec![1.0]);
        assert!(w.violation() > 1.0);
    }
}
