//! Extension of a Φ-function from a sampled domain Ω to the whole space.
//!
//! The pipeline checks (A0), (A1)_Ω and (A2) on Ω and refuses when one of
//! them fails. Otherwise it builds the candidate inverse `f` over an ambient
//! cloud, regularizes it to `g` and returns `ψ = g⁻¹` together with an
//! [`ExtensionCertificate`] listing every property of `f`, `g` and `ψ` that
//! the construction promises, each verified on the sampled data.

mod build;
mod certificate;
mod infinity;
mod psi;
mod regularize;

use std::sync::Arc;

pub use build::{build_f, phi_minus_inverse, EnvelopeInverse, FParts};
pub use certificate::{Claim, ExtensionCertificate};
pub use infinity::estimate_phi_infinity;
pub use psi::{invert_to_psi, SampledPsi};
pub use regularize::{dec_weight, regularize_g};

use crate::conditions::{
    check_a0_table, check_a1_omega_table, check_a2, estimate_adec, estimate_ainc, exponent_range_table,
    A2Inputs, CheckOptions, HFunction,
};
use crate::error::{Error, Result};
use crate::geometry::{PointCloud, SpatialDomain};
use crate::phi_core::inverse::{inverse_table, left_inverse};
use crate::phi_core::phi::{Envelope, SharedPhi};
use crate::{ExtReal, SampledFunction, TGrid, SLACK};

/// Everything the construction needs once the input checks have passed.
#[derive(Clone, Debug)]
pub struct ExtensionInputs {
    pub phi: SharedPhi,
    pub domain: SpatialDomain,
    /// The domain cloud followed by points of the complement.
    pub ambient: PointCloud,
    pub beta0: f64,
    pub beta: f64,
    pub a2: A2Inputs,
    pub p: f64,
    pub q: Option<f64>,
}

impl ExtensionInputs {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta0", self.beta0), ("beta", self.beta), ("beta2", self.a2.beta2)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Config(format!("{name} = {v} is not in (0, 1]")));
            }
        }
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::Config(format!("p = {} must be finite and >= 1", self.p)));
        }
        if let Some(q) = self.q {
            if !(q >= self.p) {
                return Err(Error::Config(format!("q = {q} is below p = {}", self.p)));
            }
        }
        let cloud = self.domain.cloud();
        if self.ambient.dim() != cloud.dim() || self.ambient.len() < cloud.len() {
            return Err(Error::Config("ambient cloud must start with the domain cloud".into()));
        }
        if (0..cloud.len()).any(|i| self.ambient.point(i) != cloud.point(i)) {
            return Err(Error::Config("ambient cloud must start with the domain cloud".into()));
        }
        Ok(())
    }
}

/// Knobs of [`extend`].
#[derive(Clone)]
pub struct ExtensionConfig {
    pub grid: TGrid,
    pub checks: CheckOptions,
    /// Overrides the (aInc) exponent; otherwise the declared one (verified)
    /// or the largest near-exact one found on the data.
    pub p: Option<f64>,
    /// (aDec) exponent to preserve; defaults to the declared one when it
    /// verifies.
    pub q: Option<f64>,
    pub phi_infinity: Option<SharedPhi>,
    pub h: Option<HFunction>,
    pub beta2: f64,
    pub s_threshold: f64,
    pub far_fraction: f64,
    /// Search bound of the restriction equivalence `ψ|_Ω ≃ φ`.
    pub l_max: f64,
    /// Domain points used by the restriction equivalence.
    pub equivalence_points: usize,
    /// Left-continuity probe: relative step below each probed node.
    pub left_continuity_delta: f64,
    pub left_continuity_tol: f64,
    /// Number of grid nodes probed for left-continuity.
    pub left_continuity_nodes: usize,
}

impl Default for ExtensionConfig {
    fn default() -> Self {
        ExtensionConfig {
            grid: TGrid::default(),
            checks: CheckOptions::default(),
            p: None,
            q: None,
            phi_infinity: None,
            h: None,
            beta2: 1.0,
            s_threshold: 1.0,
            far_fraction: 0.1,
            l_max: 1e3,
            equivalence_points: 256,
            left_continuity_delta: 1e-6,
            left_continuity_tol: 1e-4,
            left_continuity_nodes: 48,
        }
    }
}

impl std::fmt::Debug for ExtensionConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExtensionConfig")
            .field("grid", &self.grid.len())
            .field("checks", &self.checks)
            .field("p", &self.p)
            .field("q", &self.q)
            .field("phi_infinity", &self.phi_infinity.as_ref().map(|p| p.label()))
            .field("beta2", &self.beta2)
            .field("s_threshold", &self.s_threshold)
            .finish_non_exhaustive()
    }
}

/// Result of a successful [`extend`].
#[derive(Debug)]
pub struct Extension {
    pub psi: Arc<SampledPsi>,
    pub inputs: ExtensionInputs,
    pub f: SampledFunction,
    pub g: SampledFunction,
    pub parts: FParts,
    pub certificate: ExtensionCertificate,
    /// Reports of the input checks on `φ`.
    pub input_reports: Vec<crate::ConditionReport>,
}

/// Smallest positive nearest-neighbour distance of the hat cloud.
fn hat_resolution(domain: &SpatialDomain) -> f64 {
    domain.hat_cloud().resolution()
}

/// Picks `p`: override, else the declared exponent if it verifies, else
/// the largest exponent with a near-exact (aInc) constant, floored at 1.
fn choose_p(
    phi: &SharedPhi,
    table: &SampledFunction,
    config: &ExtensionConfig,
    notes: &mut Vec<String>,
) -> Result<f64> {
    if let Some(p) = config.p {
        notes.push(format!("p = {p} supplied"));
        return Ok(p);
    }
    if let Some(p) = phi.declared_ainc() {
        let r = estimate_ainc(table, p, config.checks.a_cap)?;
        if r.holds {
            notes.push(format!("p = {p} declared, (aInc) constant {}", r.constant));
            return Ok(p.max(1.0));
        }
        notes.push(format!("declared p = {p} rejected: (aInc) constant {}", r.constant));
    }
    let range = exponent_range_table(table, 1.0 + SLACK)?;
    let p = if range.p_sup.is_finite() { range.p_sup.max(1.0) } else { 1.0 };
    notes.push(format!("p = {p} from the near-exact (aInc) range (p_sup = {})", range.p_sup));
    Ok(p)
}

fn choose_q(
    phi: &SharedPhi,
    table: &SampledFunction,
    p: f64,
    config: &ExtensionConfig,
    notes: &mut Vec<String>,
) -> Result<Option<f64>> {
    let Some(q) = config.q.or_else(|| phi.declared_adec()) else {
        return Ok(None);
    };
    if q < p {
        notes.push(format!("q = {q} below p = {p}: not preserved"));
        return Ok(None);
    }
    let r = estimate_adec(table, q, config.checks.a_cap)?;
    if r.holds {
        notes.push(format!("q = {q} verified, (aDec) constant {}", r.constant));
        Ok(Some(q))
    } else {
        notes.push(format!("q = {q} does not verify on the data (constant {}); not preserved", r.constant));
        Ok(None)
    }
}

/// Runs the checks on `φ` and, when they pass, the extension and its
/// certificate. `complement` holds ambient points outside Ω.
///
/// A failed input check is returned as [`Error::Refused`] carrying the
/// failing report and its witness.
pub fn extend(
    phi: SharedPhi,
    domain: &SpatialDomain,
    complement: &PointCloud,
    config: &ExtensionConfig,
) -> Result<Extension> {
    let opts = &config.checks;
    let grid = &config.grid;
    let cloud = domain.cloud();
    let mut notes = Vec::new();

    let phi_inverse = inverse_table(phi.as_ref(), cloud, grid, opts.tol)?;
    let a0 = check_a0_table(&phi_inverse);
    if !a0.holds {
        return Err(Error::Refused(Box::new(a0)));
    }
    let a1o = check_a1_omega_table(&phi_inverse.restrict_grid(grid.one_index()..grid.len())?, opts);
    if !a1o.holds {
        return Err(Error::Refused(Box::new(a1o)));
    }

    let phi_infinity: SharedPhi = match &config.phi_infinity {
        Some(p) => p.clone(),
        None if domain.is_bounded() => Arc::new(Envelope::new(
            phi.clone(),
            cloud.clone(),
            format!("min over cloud of {}", phi.label()),
        )),
        None => Arc::new(estimate_phi_infinity(&phi, domain, config.far_fraction)?),
    };
    let origin = vec![0.0; cloud.dim()];
    let inf_at_one = left_inverse(phi_infinity.as_ref(), &origin, ExtReal::ONE, opts.tol)?.value();
    let beta0_inf = inf_at_one.min(1.0 / inf_at_one).min(1.0);
    if !(beta0_inf > 0.0) {
        let report = crate::ConditionReport::new(
            crate::ConditionId::A0,
            false,
            ExtReal::ZERO,
            crate::phi_core::report::Lattice::new(1, grid),
        )
        .with_witness(Some(
            crate::Witness::new(vec![origin.clone()], vec![1.0]).with_inequality(f64::MIN_POSITIVE, f64::INFINITY, 1.0),
        ))
        .with_detail(format!("phi_infinity^-1(1) = {inf_at_one}"));
        return Err(Error::Refused(Box::new(report)));
    }
    let beta0 = a0.constant.value().min(beta0_inf);
    notes.push(format!(
        "beta0 = {beta0} (phi: {}, phi_infinity: {beta0_inf})",
        a0.constant
    ));

    let a2_inputs = {
        let mut a = A2Inputs::new(phi_infinity.clone())
            .with_beta2(config.beta2)
            .with_s_threshold(config.s_threshold)
            .with_value_threshold(beta0);
        if let Some(h) = &config.h {
            a = a.with_h(h.clone());
        }
        a
    };
    let a2 = check_a2(phi.as_ref(), domain, &a2_inputs, grid, opts)?;
    if !a2.report.holds {
        return Err(Error::Refused(Box::new(a2.report)));
    }

    let phi_table = SampledFunction::tabulate(phi.as_ref(), cloud, grid)?;
    let p = choose_p(&phi, &phi_table, config, &mut notes)?;
    let q = choose_q(&phi, &phi_table, p, config, &mut notes)?;

    let inputs = ExtensionInputs {
        phi: phi.clone(),
        domain: domain.clone(),
        ambient: cloud.concat(complement),
        beta0,
        beta: a1o.constant.value(),
        a2: a2_inputs,
        p,
        q,
    };
    inputs.validate()?;
    notes.push(format!("beta = {} from (A1)_Omega", inputs.beta));
    notes.push(format!("hat cloud: {} points, resolution {:.3e}", domain.hat().len(), hat_resolution(domain)));

    let parts = FParts::with_phi_inverse(&inputs, phi_inverse, opts.tol)?;
    let f = build::build_f_from(&inputs, &parts)?;
    let g = regularize_g(&f, p)?;
    let psi = Arc::new(invert_to_psi(g.clone(), p, q)?);

    let input_reports = vec![a0, a1o, a2.report];
    let certificate = certificate::certify(&inputs, &parts, &f, &g, &psi, config, notes)?;
    Ok(Extension {
        psi,
        inputs,
        f,
        g,
        parts,
        certificate,
        input_reports,
    })
}
