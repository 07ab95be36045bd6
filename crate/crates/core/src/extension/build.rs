use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{PointCloud, SpatialDomain};
use crate::phi_core::inverse::{inverse_table, invert};
use crate::phi_core::phi::{Envelope, PhiFunction};
use crate::{SampledFunction, TGrid, SLACK};

use super::ExtensionInputs;

/// `(φ_Ω⁻)⁻¹` on the grid, with `φ_Ω⁻(t) = min_{x ∈ cloud} φ(x, t)`.
#[derive(Clone, Debug)]
pub struct EnvelopeInverse {
    pub envelope: Envelope,
    /// One-point table over the grid.
    pub inverse: SampledFunction,
}

fn one_point(dim: usize) -> PointCloud {
    PointCloud::from_points(dim, &[vec![0.0; dim]]).expect("origin is finite")
}

/// Inverts an `x`-independent evaluator over the grid.
pub(crate) fn scalar_inverse(phi: &dyn PhiFunction, grid: &TGrid, tol: f64) -> Result<SampledFunction> {
    inverse_table(phi, &one_point(phi.dimension()), grid, tol)
}

/// `(φ_Ω⁻)⁻¹` and the check that it dominates every pointwise inverse.
pub fn phi_minus_inverse(
    phi: &crate::SharedPhi,
    domain: &SpatialDomain,
    grid: &TGrid,
    tol: f64,
) -> Result<EnvelopeInverse> {
    let pointwise = inverse_table(phi.as_ref(), domain.cloud(), grid, tol)?;
    phi_minus_inverse_with(phi, domain, &pointwise, tol)
}

pub(crate) fn phi_minus_inverse_with(
    phi: &crate::SharedPhi,
    domain: &SpatialDomain,
    pointwise: &SampledFunction,
    tol: f64,
) -> Result<EnvelopeInverse> {
    let envelope = Envelope::new(phi.clone(), domain.cloud().clone(), format!("min over cloud of {}", phi.label()));
    let grid = pointwise.grid();
    let inverse = scalar_inverse(&envelope, grid, tol)?;
    let env = inverse.row(0);
    for i in 0..pointwise.n_points() {
        for (j, (&v, &e)) in pointwise.row(i).iter().zip(env).enumerate() {
            if v > e * (1.0 + SLACK) {
                return Err(Error::Structural(format!(
                    "envelope inverse {e} < pointwise inverse {v} at x = {:?}, t = {}",
                    pointwise.points().point(i),
                    grid.samples()[j]
                )));
            }
        }
    }
    Ok(EnvelopeInverse { envelope, inverse })
}

/// Precomputed pieces of `f`: inverse tables of `φ` on Ω, of `φ_Ω⁻` and of
/// `φ_∞`.
#[derive(Clone, Debug)]
pub struct FParts {
    pub phi_inverse: SampledFunction,
    pub envelope: EnvelopeInverse,
    pub infinity_inverse: SampledFunction,
}

impl FParts {
    pub fn compute(inputs: &ExtensionInputs, grid: &TGrid, tol: f64) -> Result<Self> {
        let phi_inverse = inverse_table(inputs.phi.as_ref(), inputs.domain.cloud(), grid, tol)?;
        Self::with_phi_inverse(inputs, phi_inverse, tol)
    }

    pub(crate) fn with_phi_inverse(inputs: &ExtensionInputs, phi_inverse: SampledFunction, tol: f64) -> Result<Self> {
        let envelope = phi_minus_inverse_with(&inputs.phi, &inputs.domain, &phi_inverse, tol)?;
        let infinity_inverse = scalar_inverse(inputs.a2.phi_infinity.as_ref(), phi_inverse.grid(), tol)?;
        Ok(FParts {
            phi_inverse,
            envelope,
            infinity_inverse,
        })
    }
}

/// The table of `f` over the ambient cloud:
///
/// * `t ≤ 1`: `β₀² φ⁻¹(x, t)` on Ω, `β₀² φ_∞⁻¹(t)` off Ω;
/// * `t > 1`: `min{(φ_Ω⁻)⁻¹(t), min_{y ∈ Ω̂} β^{−|x−y| t^{1/n}} φ⁻¹(y, t)}`;
/// * `t = ∞`: `∞` (implicit sentinel).
pub fn build_f(inputs: &ExtensionInputs, grid: &TGrid, tol: f64) -> Result<SampledFunction> {
    inputs.validate()?;
    let parts = FParts::compute(inputs, grid, tol)?;
    build_f_from(inputs, &parts)
}

pub(crate) fn build_f_from(inputs: &ExtensionInputs, parts: &FParts) -> Result<SampledFunction> {
    let hat = inputs.domain.hat();
    if hat.is_empty() {
        return Err(Error::Config("hat cloud is empty".into()));
    }
    let grid = parts.phi_inverse.grid();
    let t = grid.samples();
    let m = t.len();
    let one = grid.one_index();
    let ambient = &inputs.ambient;
    let n_omega = inputs.domain.len();
    let cloud = inputs.domain.cloud();
    let b02 = inputs.beta0 * inputs.beta0;
    let c = -inputs.beta.ln();
    let inv_n = 1.0 / ambient.dim() as f64;

    // t-major ln φ⁻¹(y, t) over the hat points, for nodes above 1
    let upper = one + 1..m;
    let h = hat.len();
    let mut ln_hat = vec![0.0; upper.len() * h];
    for (k, j) in upper.clone().enumerate() {
        for (s, &y) in hat.iter().enumerate() {
            ln_hat[k * h + s] = parts.phi_inverse.value(y, j).ln();
        }
    }
    let scale: Vec<f64> = upper.clone().map(|j| c * t[j].powf(inv_n)).collect();
    let ln_env: Vec<f64> = upper.clone().map(|j| parts.envelope.inverse.value(0, j).ln()).collect();
    let hat_cloud = cloud.subset(hat);

    let rows: Vec<Vec<f64>> = (0..ambient.len())
        .into_par_iter()
        .map(|x| {
            let mut row = Vec::with_capacity(m);
            for j in 0..=one {
                let v = if x < n_omega {
                    parts.phi_inverse.value(x, j)
                } else {
                    parts.infinity_inverse.value(0, j)
                };
                row.push(b02 * v);
            }
            let px = ambient.point(x);
            let d: Vec<f64> = hat_cloud.iter().map(|y| crate::geometry::distance(px, y)).collect();
            for k in 0..upper.len() {
                let a = scale[k];
                let lv = &ln_hat[k * h..(k + 1) * h];
                let mut acc = [f64::INFINITY; 4];
                let chunks = h / 4;
                for q in 0..chunks {
                    for l in 0..4 {
                        let s = 4 * q + l;
                        let v = a.mul_add(d[s], lv[s]);
                        if v < acc[l] {
                            acc[l] = v;
                        }
                    }
                }
                let mut best = acc[0].min(acc[1]).min(acc[2].min(acc[3]));
                for s in 4 * chunks..h {
                    best = best.min(a.mul_add(d[s], lv[s]));
                }
                row.push(best.min(ln_env[k]).exp());
            }
            row
        })
        .collect();
    SampledFunction::new(ambient.clone(), grid.clone(), rows.concat())
}

/// Evaluates the defining formula of `f` at an arbitrary `t`, inverting
/// `φ`, `φ_Ω⁻` and `φ_∞` on the spot.
pub(crate) struct FFormula<'a> {
    pub inputs: &'a ExtensionInputs,
    pub envelope: &'a Envelope,
    pub tol: f64,
}

impl FFormula<'_> {
    /// `f(x, t)` for every ambient index in `xs`.
    pub fn eval_many(&self, xs: &[usize], t: f64) -> Result<Vec<f64>> {
        let inputs = self.inputs;
        let b02 = inputs.beta0 * inputs.beta0;
        let cloud = inputs.domain.cloud();
        let n_omega = inputs.domain.len();
        let inv = |phi: &dyn PhiFunction, x: &[f64]| invert(&|s| phi.eval(x, s), x, t, self.tol, t.max(1e-300));
        if t <= 1.0 {
            let inf = inv(inputs.a2.phi_infinity.as_ref(), &vec![0.0; cloud.dim()])?;
            return xs
                .iter()
                .map(|&x| {
                    Ok(if x < n_omega {
                        b02 * inv(inputs.phi.as_ref(), cloud.point(x))?
                    } else {
                        b02 * inf
                    })
                })
                .collect();
        }
        let env = inv(self.envelope, &vec![0.0; cloud.dim()])?;
        let hat: Vec<f64> = inputs
            .domain
            .hat()
            .par_iter()
            .map(|&y| inv(inputs.phi.as_ref(), cloud.point(y)).map(f64::ln))
            .collect::<Result<_>>()?;
        let a = -inputs.beta.ln() * t.powf(1.0 / cloud.dim() as f64);
        Ok(xs
            .iter()
            .map(|&x| {
                let px = inputs.ambient.point(x);
                let best = inputs
                    .domain
                    .hat()
                    .iter()
                    .zip(&hat)
                    .map(|(&y, lv)| a.mul_add(crate::geometry::distance(px, cloud.point(y)), *lv))
                    .fold(env.ln(), f64::min);
                best.exp()
            })
            .collect())
    }
}
