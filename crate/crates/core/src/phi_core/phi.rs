use std::fmt;
use std::sync::Arc;

use crate::geometry::PointCloud;
use crate::phi_core::ext_real::ExtReal;

/// A generalized Φ-function evaluator `φ(x, t)`.
///
/// `eval` receives `t ∈ [0, ∞]` (with `t = f64::INFINITY` meaning ∞) and
/// returns a value in `[0, ∞]`. Implementations must be pure.
pub trait PhiFunction: Send + Sync + fmt::Debug {
    /// Spatial dimension `n` of the points accepted by `eval`.
    fn dimension(&self) -> usize;

    fn eval(&self, x: &[f64], t: f64) -> f64;

    fn evaluate(&self, x: &[f64], t: ExtReal) -> ExtReal {
        ExtReal::clamped(self.eval(x, t.value()))
    }

    /// Exponent `p` for which the family is known to satisfy (aInc)_p.
    fn declared_ainc(&self) -> Option<f64> {
        None
    }

    /// Exponent `q` for which the family is known to satisfy (aDec)_q.
    fn declared_adec(&self) -> Option<f64> {
        None
    }

    /// `false` when `φ(x, t)` does not depend on `x`.
    fn is_spatial(&self) -> bool {
        true
    }

    /// Closed-form left inverse, when the family has one. Only test oracles
    /// use this; the library always inverts numerically.
    fn analytic_inverse(&self, _x: &[f64], _tau: f64) -> Option<f64> {
        None
    }

    fn label(&self) -> String;
}

pub type SharedPhi = Arc<dyn PhiFunction>;

type EvalFn = dyn Fn(&[f64], f64) -> f64 + Send + Sync;

/// Evaluator built from a closure.
#[derive(Clone)]
pub struct FnPhi {
    dim: usize,
    label: String,
    f: Arc<EvalFn>,
    ainc: Option<f64>,
    adec: Option<f64>,
    spatial: bool,
}

impl FnPhi {
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        f: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        FnPhi {
            dim,
            label: label.into(),
            f: Arc::new(f),
            ainc: None,
            adec: None,
            spatial: true,
        }
    }

    /// Convenience for `x`-independent functions.
    pub fn of_t(
        dim: usize,
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let mut phi = FnPhi::new(dim, label, move |_, t| f(t));
        phi.spatial = false;
        phi
    }

    pub fn with_ainc(mut self, p: f64) -> Self {
        self.ainc = Some(p);
        self
    }

    pub fn with_adec(mut self, q: f64) -> Self {
        self.adec = Some(q);
        self
    }

    pub fn shared(self) -> SharedPhi {
        Arc::new(self)
    }
}

impl fmt::Debug for FnPhi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnPhi")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .finish()
    }
}

impl PhiFunction for FnPhi {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64], t: f64) -> f64 {
        (self.f)(x, t)
    }

    fn declared_ainc(&self) -> Option<f64> {
        self.ainc
    }

    fn declared_adec(&self) -> Option<f64> {
        self.adec
    }

    fn is_spatial(&self) -> bool {
        self.spatial
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Lower envelope `t ↦ min_{x ∈ S} φ(x, t)` over a finite point set.
///
/// This is `φ_Ω⁻` when `S` is the domain cloud, and the liminf proxy for
/// `φ_∞` when `S` is the far part of an unbounded cloud.
#[derive(Debug, Clone)]
pub struct Envelope {
    phi: SharedPhi,
    points: PointCloud,
    label: String,
}

impl Envelope {
    pub fn new(phi: SharedPhi, points: PointCloud, label: impl Into<String>) -> Self {
        assert!(!points.is_empty(), "envelope over an empty point set");
        Envelope {
            phi,
            points,
            label: label.into(),
        }
    }

    pub fn points(&self) -> &PointCloud {
        &self.points
    }
}

impl PhiFunction for Envelope {
    fn dimension(&self) -> usize {
        self.phi.dimension()
    }

    fn eval(&self, _x: &[f64], t: f64) -> f64 {
        self.points
            .iter()
            .map(|p| self.phi.eval(p, t))
            .fold(f64::INFINITY, f64::min)
    }

    fn declared_ainc(&self) -> Option<f64> {
        self.phi.declared_ainc()
    }

    fn declared_adec(&self) -> Option<f64> {
        self.phi.declared_adec()
    }

    fn is_spatial(&self) -> bool {
        false
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}
