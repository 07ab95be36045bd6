use crate::error::{Error, Result};
use crate::geometry::ball::{unit_ball_volume, Ball};
use crate::geometry::cloud::{distance, Point};

/// Points `x = x_0, …, x_k = y` along a polyline with balls `B_1, …, B_k`,
/// `B_j` centred between `x_{j-1}` and `x_j` with diameter `2|x_{j-1} − x_j|`.
#[derive(Clone, Debug)]
pub struct Chain {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub t: f64,
    pub points: Vec<Vec<f64>>,
    pub balls: Vec<Ball>,
    pub k: usize,
    pub path_length: f64,
    /// Nominal spacing `1/(ω_n t)^{1/n}`.
    pub spacing: f64,
}

impl Chain {
    /// Checks the gap, containment and measure invariants.
    pub fn verify(&self) -> std::result::Result<(), String> {
        if self.points.len() != self.k + 1 || self.balls.len() != self.k {
            return Err("point/ball count mismatch".into());
        }
        for j in 0..self.k {
            let (a, b) = (&self.points[j], &self.points[j + 1]);
            let gap = distance(a, b);
            if gap > self.spacing * (1.0 + 1e-9) {
                return Err(format!("gap {gap} at segment {j} exceeds spacing {}", self.spacing));
            }
            let ball = &self.balls[j];
            if !ball.contains(a) || !ball.contains(b) {
                return Err(format!("ball {j} misses its endpoints"));
            }
            if 1.0 / ball.measure() < self.t {
                return Err(format!("ball {j} has 1/|B| = {} < t", 1.0 / ball.measure()));
            }
        }
        Ok(())
    }
}

/// Walks `path` placing points at arclength `j/(ω_n t)^{1/n}` and ends at
/// the last vertex.
pub fn chain_points(path: &[Point], t: f64, n: usize) -> Result<Chain> {
    if path.is_empty() {
        return Err(Error::Config("empty path".into()));
    }
    if !(t >= 1.0) || !t.is_finite() {
        return Err(Error::Config(format!("chain parameter t = {t} must be finite and ≥ 1")));
    }
    if let Some(p) = path.iter().find(|p| p.dim() != n) {
        return Err(Error::Config(format!("path vertex {:?} is not in dimension {n}", p.coords())));
    }
    let spacing = (unit_ball_volume(n) * t).powf(-1.0 / n as f64);
    // cap on ball radii so that rounding never pushes |B| above 1/t; the
    // midpoint-centred ball still contains both points
    let r_cap = spacing * (1.0 - 1e-9);
    let from = path[0].coords().to_vec();
    let to = path[path.len() - 1].coords().to_vec();
    let seg_len: Vec<f64> = path.windows(2).map(|w| distance(w[0].coords(), w[1].coords())).collect();
    let total: f64 = seg_len.iter().sum();

    let mut points = vec![from.clone()];
    if total > 0.0 {
        let mut seg = 0;
        let mut seg_start = 0.0;
        let mut j = 1usize;
        loop {
            let s = j as f64 * spacing;
            if s >= total * (1.0 - 1e-12) {
                break;
            }
            while seg + 1 < seg_len.len() && seg_start + seg_len[seg] < s {
                seg_start += seg_len[seg];
                seg += 1;
            }
            let a = path[seg].coords();
            let b = path[seg + 1].coords();
            let u = if seg_len[seg] > 0.0 {
                ((s - seg_start) / seg_len[seg]).clamp(0.0, 1.0)
            } else {
                0.0
            };
            points.push(a.iter().zip(b).map(|(p, q)| p + u * (q - p)).collect());
            j += 1;
        }
        points.push(to.clone());
    }

    let balls = points
        .windows(2)
        .map(|w| {
            let gap = distance(&w[0], &w[1]);
            let center = w[0].iter().zip(&w[1]).map(|(a, b)| 0.5 * (a + b)).collect();
            // coincident consecutive points (a polyline doubling back): any
            // radius up to the spacing keeps 1/|B| ≥ t
            let radius = if gap > 0.0 { gap.min(r_cap) } else { 0.5 * spacing };
            Ball::new(center, radius)
        })
        .collect::<Vec<_>>();
    Ok(Chain {
        from,
        to,
        t,
        k: balls.len(),
        points,
        balls,
        path_length: total,
        spacing,
    })
}

/// `2 ω_n^{1/n}`: the chain has at most `ℓ/spacing + 1` segments and
/// `1/spacing = (ω_n t)^{1/n}`.
pub fn default_c_impl(n: usize) -> f64 {
    2.0 * unit_ball_volume(n).powf(1.0 / n as f64)
}

/// `C_impl · K · t^{1/n} · distance + C_impl`.
pub fn chain_count_bound(k: f64, distance: f64, t: f64, n: usize, c_impl: f64) -> f64 {
    c_impl * k * t.powf(1.0 / n as f64) * distance + c_impl
}

/// (A1) constant implied by an (A1)_Ω constant: `β^{c(n)+1}` with
/// `c(n) = 2 ω_n^{-1/n}`.
pub fn a1_from_a1omega(beta: f64, n: usize) -> f64 {
    assert!(beta > 0.0 && beta <= 1.0, "β must lie in (0, 1]");
    let c = 2.0 * unit_ball_volume(n).powf(-1.0 / n as f64);
    beta.powf(c + 1.0)
}

/// (A1)_Ω bound transported from an (A1) constant along chains.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransportedA1 {
    pub base: f64,
    pub c_impl: f64,
    pub k: f64,
    pub n: usize,
}

impl TransportedA1 {
    /// `β^{C_impl K t^{1/n} |x−y| + C_impl}`.
    pub fn factor(&self, distance: f64, t: f64) -> f64 {
        self.base
            .powf(chain_count_bound(self.k, distance, t, self.n, self.c_impl))
    }

    /// The constant `β^{C_impl K}` in the standard (A1)_Ω form
    /// `β_Ω^{|x−y| t^{1/n} + 1}`; it is below [`factor`](Self::factor)
    /// because `K ≥ 1`.
    pub fn omega_beta(&self) -> f64 {
        self.base.powf(self.c_impl * self.k)
    }
}

/// Transports an (A1) constant to (A1)_Ω on a `K`-quasi-convex domain.
pub fn a1omega_from_a1(beta: f64, k: f64, n: usize) -> TransportedA1 {
    assert!(beta > 0.0 && beta <= 1.0, "β must lie in (0, 1]");
    assert!(k >= 1.0, "K must be at least 1");
    TransportedA1 {
        base: beta,
        c_impl: default_c_impl(n),
        k,
        n,
    }
}
