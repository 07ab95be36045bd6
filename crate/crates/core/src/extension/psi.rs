use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::phi_core::axioms::check_inverse_axioms;
use crate::phi_core::phi::PhiFunction;
use crate::SampledFunction;

/// `ψ = g⁻¹` materialised from a table of `g`.
///
/// `ψ(x, τ) = inf{t : g(x, t) ≥ τ}`: the first grid node with `g ≥ τ` is
/// found by binary search, and between nodes `g` is taken to be a power
/// law, so ψ is log-log linear there and hits the nodes exactly. Outside
/// the grid ψ continues as a power law whose exponent is the row's own
/// log-log slope at that end, clamped to `[p, q]` (to `[p, ∞)` without `q`).
///
/// `x` is matched against the table's points by exact coordinates, falling
/// back to the nearest point.
pub struct SampledPsi {
    g: SampledFunction,
    p: f64,
    q: Option<f64>,
    index: HashMap<u64, Vec<usize>>,
    /// Extrapolation exponents per row, below and above the grid.
    tails: Vec<(f64, f64)>,
}

fn key(x: &[f64]) -> u64 {
    // FNV-1a over the coordinate bits
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for c in x {
        let c = if *c == 0.0 { 0.0f64 } else { *c };
        for b in c.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

impl fmt::Debug for SampledPsi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledPsi")
            .field("points", &self.g.n_points())
            .field("grid", &self.g.grid().len())
            .field("p", &self.p)
            .field("q", &self.q)
            .finish()
    }
}

impl SampledPsi {
    pub fn g(&self) -> &SampledFunction {
        &self.g
    }

    /// Row of the table used for `x`.
    pub fn row_of(&self, x: &[f64]) -> usize {
        if let Some(bucket) = self.index.get(&key(x)) {
            if let Some(&i) = bucket.iter().find(|&&i| self.g.points().point(i) == x) {
                return i;
            }
        }
        let pts = self.g.points();
        (0..pts.len())
            .min_by(|&a, &b| {
                crate::geometry::distance(pts.point(a), x).total_cmp(&crate::geometry::distance(pts.point(b), x))
            })
            .expect("table has points")
    }

    pub(crate) fn eval_row(&self, i: usize, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        if tau == f64::INFINITY {
            return f64::INFINITY;
        }
        let row = self.g.row(i);
        let t = self.g.grid().samples();
        let j = row.partition_point(|&v| v < tau);
        if j == 0 {
            return t[0] * (tau / row[0]).powf(self.tails[i].0);
        }
        if j == row.len() {
            let last = row.len() - 1;
            return t[last] * (tau / row[last]).powf(self.tails[i].1);
        }
        if tau == row[j] {
            return t[j];
        }
        let (g0, g1) = (row[j - 1], row[j]);
        let theta = (tau / g0).ln() / (g1 / g0).ln();
        t[j - 1] * (t[j] / t[j - 1]).powf(theta)
    }
}

/// Builds `ψ = g⁻¹`; refuses when `g` is not the inverse of a weak
/// Φ-function on the grid.
pub fn invert_to_psi(g: SampledFunction, p: f64, q: Option<f64>) -> Result<SampledPsi> {
    let axioms = check_inverse_axioms(&g);
    if !axioms.holds {
        return Err(Error::Refused(Box::new(axioms)));
    }
    let mut index: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, x) in g.points().iter().enumerate() {
        index.entry(key(x)).or_default().push(i);
    }
    let t = g.grid().samples();
    let m = t.len();
    let hi = q.unwrap_or(f64::INFINITY);
    let slope = |a: usize, b: usize, row: &[f64]| {
        let e = (t[b] / t[a]).ln() / (row[b] / row[a]).ln();
        if e.is_finite() && e > 0.0 {
            e.clamp(p, hi)
        } else {
            p
        }
    };
    let tails = g
        .rows()
        .map(|row| {
            if m < 2 {
                (p, q.unwrap_or(p))
            } else {
                (slope(0, 1, row), slope(m - 2, m - 1, row))
            }
        })
        .collect();
    Ok(SampledPsi { g, p, q, index, tails })
}

impl PhiFunction for SampledPsi {
    fn dimension(&self) -> usize {
        self.g.points().dim()
    }

    fn eval(&self, x: &[f64], t: f64) -> f64 {
        self.eval_row(self.row_of(x), t)
    }

    fn declared_ainc(&self) -> Option<f64> {
        Some(self.p)
    }

    fn declared_adec(&self) -> Option<f64> {
        self.q
    }

    fn label(&self) -> String {
        "psi".into()
    }
}
