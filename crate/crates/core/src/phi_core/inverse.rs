use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::phi_core::ext_real::ExtReal;
use crate::phi_core::grid::TGrid;
use crate::phi_core::phi::PhiFunction;
use crate::phi_core::sampled::SampledFunction;
use crate::BISECTION_MAX_ITER;

const T_FLOOR: f64 = 1e-300;
const T_CEIL: f64 = 1e300;

/// Left inverse `φ⁻¹(x, τ) = inf{t ≥ 0 : φ(x, t) ≥ τ}`.
///
/// Brackets the infimum by geometric expansion from `t = 1`, then bisects
/// in log-space until the bracket's relative width is below `tol` (at most
/// 200 iterations). A decrease of `φ` observed along the way is reported as
/// [`Error::NonMonotone`].
pub fn left_inverse(phi: &dyn PhiFunction, x: &[f64], tau: ExtReal, tol: f64) -> Result<ExtReal> {
    assert!(tol > 0.0, "tolerance must be positive");
    let r = invert(&|t| phi.eval(x, t), x, tau.value(), tol, 1.0)?;
    Ok(ExtReal::clamped(r))
}

/// Tabulates `φ⁻¹(x, τ)` for every cloud point `x` and grid node `τ`.
///
/// Each row is warm-started from the previous node's result, which is valid
/// because the left inverse is increasing in `τ`.
pub fn inverse_table(
    phi: &dyn PhiFunction,
    cloud: &PointCloud,
    grid: &TGrid,
    tol: f64,
) -> Result<SampledFunction> {
    let rows: Vec<Result<Vec<f64>>> = (0..cloud.len())
        .into_par_iter()
        .map(|i| {
            let x = cloud.point(i);
            let mut hint = 1.0;
            grid.samples()
                .iter()
                .map(|&tau| {
                    let r = invert(&|t| phi.eval(x, t), x, tau, tol, hint)?;
                    if r > 0.0 && r.is_finite() {
                        hint = r;
                    }
                    Ok(r)
                })
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(cloud.len() * grid.len());
    for row in rows {
        values.extend(row?);
    }
    SampledFunction::new(cloud.clone(), grid.clone(), values)
}

/// Shared bracketing + bisection kernel. `hint` is a finite positive start.
pub(crate) fn invert(
    eval: &dyn Fn(f64) -> f64,
    x: &[f64],
    tau: f64,
    tol: f64,
    hint: f64,
) -> Result<f64> {
    if tau <= 0.0 {
        return Ok(0.0);
    }
    let call = |t: f64| -> Result<f64> {
        let v = eval(t);
        if v.is_nan() {
            Err(Error::NotANumber { x: x.to_vec(), t })
        } else {
            Ok(v)
        }
    };
    let non_monotone = |t_lo: f64, v_lo: f64, t_hi: f64, v_hi: f64| Error::NonMonotone {
        x: x.to_vec(),
        t_lo,
        v_lo,
        t_hi,
        v_hi,
    };

    let start = if hint.is_finite() && hint > 0.0 { hint } else { 1.0 };
    let v_start = call(start)?;
    let (mut lo, mut v_lo, mut hi, mut v_hi);
    let mut factor = 2.0_f64;
    if v_start >= tau {
        hi = start;
        v_hi = v_start;
        loop {
            let cand = hi / factor;
            if cand < T_FLOOR {
                return Ok(0.0);
            }
            let v = call(cand)?;
            if v > v_hi {
                return Err(non_monotone(cand, v, hi, v_hi));
            }
            if v < tau {
                lo = cand;
                v_lo = v;
                break;
            }
            hi = cand;
            v_hi = v;
            factor = (factor * factor).min(1e100);
        }
    } else {
        lo = start;
        v_lo = v_start;
        loop {
            let cand = lo * factor;
            if cand > T_CEIL {
                return Ok(f64::INFINITY);
            }
            let v = call(cand)?;
            if v < v_lo {
                return Err(non_monotone(lo, v_lo, cand, v));
            }
            if v >= tau {
                hi = cand;
                v_hi = v;
                break;
            }
            lo = cand;
            v_lo = v;
            factor = (factor * factor).min(1e100);
        }
    }

    for _ in 0..BISECTION_MAX_ITER {
        if hi / lo - 1.0 <= tol {
            break;
        }
        let mid = lo * (hi / lo).sqrt();
        let v = call(mid)?;
        if v < v_lo {
            return Err(non_monotone(lo, v_lo, mid, v));
        }
        if v > v_hi {
            return Err(non_monotone(mid, v, hi, v_hi));
        }
        if v >= tau {
            hi = mid;
            v_hi = v;
        } else {
            lo = mid;
            v_lo = v;
        }
    }
    Ok(lo * (hi / lo).sqrt())
}
