use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::conditions::CheckOptions;
use crate::error::Result;
use crate::geometry::{Ball, PointCloud, SpatialDomain};
use crate::phi_core::inverse::inverse_table;
use crate::phi_core::phi::PhiFunction;
use crate::phi_core::report::{ConditionId, ConditionReport, Coverage, Lattice, Witness};
use crate::{ExtReal, SampledFunction, TGrid};

/// `ball_budget` balls of measure at most one.
///
/// Half are centred at random cloud points with radii stratified
/// geometrically from the cloud resolution up to the unit-measure radius;
/// the other half sit on the closest nearest-neighbour pairs, which is where
/// a discontinuity between two samples is seen at the largest `t`.
pub fn sample_balls(cloud: &PointCloud, budget: usize, seed: u64) -> Vec<Ball> {
    let n = cloud.dim();
    let r_max = Ball::unit_measure_radius(n);
    if cloud.len() < 2 || budget == 0 {
        return cloud
            .iter()
            .take(budget.max(1).min(cloud.len()))
            .map(|c| Ball::new(c.to_vec(), r_max))
            .collect();
    }
    let nn = cloud.nearest_neighbor_distances();
    let r_min = nn
        .iter()
        .copied()
        .filter(|d| *d > 0.0)
        .fold(f64::INFINITY, f64::min)
        .min(r_max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = budget - budget / 2;
    let mut balls = Vec::with_capacity(budget);
    for k in 0..random {
        let c = cloud.point(rng.gen_range(0..cloud.len())).to_vec();
        let u = (k as f64 + rng.gen::<f64>()) / random as f64;
        let r = r_min * (r_max / r_min).powf(u);
        balls.push(Ball::new(c, r));
    }
    let mut pairs: Vec<(f64, usize)> = nn
        .iter()
        .enumerate()
        .filter(|(_, d)| **d > 0.0 && d.is_finite())
        .map(|(i, d)| (*d, i))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for &(d, i) in pairs.iter().take(budget / 2) {
        let j = (0..cloud.len())
            .filter(|&j| j != i)
            .min_by(|&a, &b| cloud.distance(i, a).total_cmp(&cloud.distance(i, b)))
            .expect("cloud has two points");
        let center = cloud
            .point(i)
            .iter()
            .zip(cloud.point(j))
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        balls.push(Ball::new(center, d.min(r_max)));
    }
    balls
}

/// `√t_max` split used by the drift test, as a grid index bound.
fn half_split(grid: &TGrid) -> f64 {
    if grid.max() > 1.0 {
        grid.max().sqrt()
    } else {
        1.0
    }
}

/// Ratio `min / max` with `0/0` and `∞/∞` counted as 1.
fn ratio(num: f64, den: f64) -> f64 {
    if num == den {
        1.0
    } else {
        num / den
    }
}

#[derive(Clone, Copy, Debug)]
struct Sharpest {
    value: f64,
    ball: usize,
    node: usize,
    x: usize,
    y: usize,
}

impl Sharpest {
    const NONE: Sharpest = Sharpest {
        value: f64::INFINITY,
        ball: usize::MAX,
        node: 0,
        x: 0,
        y: 0,
    };

    fn min(self, other: Sharpest) -> Sharpest {
        if other.value < self.value {
            other
        } else {
            self
        }
    }
}

fn drift_verdict(beta: f64, beta_half: f64, drift_tol: f64) -> bool {
    beta > 0.0 && beta >= (1.0 - drift_tol) * beta_half
}

/// (A1) on an inverse table: for every ball `B` and grid `t ∈ [1, 1/|B|]`,
/// `β = min φ⁻¹(y, t) / φ⁻¹(x, t)` over cloud points `x, y ∈ B`.
///
/// A finite table always yields `β > 0`, so the verdict also asks that β
/// does not keep shrinking as `t` grows: it fails when β over the whole grid
/// is below `(1 − drift_tol)` times β over `t ≤ √t_max`.
pub fn check_a1_table(inverse: &SampledFunction, balls: &[Ball], opts: &CheckOptions) -> ConditionReport {
    let cloud = inverse.points();
    let grid = inverse.grid();
    let t = grid.samples();
    let one = grid.one_index();
    let split = half_split(grid);

    let per_ball: Vec<(Sharpest, Sharpest, bool)> = balls
        .par_iter()
        .enumerate()
        .map(|(b, ball)| {
            let members: Vec<usize> = (0..cloud.len()).filter(|&i| ball.contains(cloud.point(i))).collect();
            if members.len() < 2 {
                return (Sharpest::NONE, Sharpest::NONE, false);
            }
            let t_cap = (1.0 / ball.measure()) * (1.0 + 1e-12);
            let (mut full, mut half) = (Sharpest::NONE, Sharpest::NONE);
            for j in one..t.len() {
                if t[j] > t_cap {
                    break;
                }
                let (mut lo, mut lo_at, mut hi, mut hi_at) = (f64::INFINITY, members[0], 0.0f64, members[0]);
                for &i in &members {
                    let v = inverse.value(i, j);
                    if v < lo {
                        lo = v;
                        lo_at = i;
                    }
                    if v > hi {
                        hi = v;
                        hi_at = i;
                    }
                }
                let s = Sharpest {
                    value: ratio(lo, hi),
                    ball: b,
                    node: j,
                    x: hi_at,
                    y: lo_at,
                };
                full = full.min(s);
                if t[j] <= split {
                    half = half.min(s);
                }
            }
            (full, half, true)
        })
        .collect();

    let mut full = Sharpest::NONE;
    let mut half = Sharpest::NONE;
    let mut used = 0;
    for (f, h, u) in per_ball {
        full = full.min(f);
        half = half.min(h);
        used += u as usize;
    }
    let lattice = Lattice::new(cloud.len(), grid);
    if used == 0 || full.ball == usize::MAX {
        return ConditionReport::new(ConditionId::A1, true, ExtReal::ONE, lattice)
            .with_coverage(Coverage::Vacuous)
            .with_detail(format!("no sampled ball among {} held two cloud points", balls.len()));
    }
    let beta = full.value.min(1.0);
    let beta_half = half.value.min(1.0);
    let holds = drift_verdict(beta, beta_half, opts.drift_tol);
    let tested = if holds {
        beta
    } else if beta_half > 0.0 {
        beta_half
    } else {
        f64::MIN_POSITIVE
    };
    let vx = inverse.value(full.x, full.node);
    let vy = inverse.value(full.y, full.node);
    let witness = Witness::at(cloud, &[full.x, full.y], vec![t[full.node]])
        .with_ball(balls[full.ball].clone())
        .with_inequality(tested, scaled(tested, vx), vy);
    ConditionReport::new(
        ConditionId::A1,
        holds,
        ExtReal::clamped(if holds { beta } else { 0.0 }),
        lattice,
    )
    .with_witness(Some(witness))
    .with_detail(format!(
        "beta = {beta:.6e} over {used} balls with two or more points; beta = {beta_half:.6e} for t <= {split:.3e}"
    ))
    .note(format!("balls sampled: {}", balls.len()))
}

/// `c · v` with `c · ∞ = ∞` for `c > 0`.
fn scaled(c: f64, v: f64) -> f64 {
    if v == f64::INFINITY {
        v
    } else {
        c * v
    }
}

/// (A1) for an evaluator: inverts φ over the domain cloud and samples
/// `opts.ball_budget` balls.
pub fn check_a1(
    phi: &dyn PhiFunction,
    domain: &SpatialDomain,
    grid: &TGrid,
    opts: &CheckOptions,
) -> Result<ConditionReport> {
    let grid = upper_half(grid)?;
    let inverse = inverse_table(phi, domain.cloud(), &grid, opts.tol)?;
    let balls = sample_balls(domain.cloud(), opts.ball_budget, opts.seed);
    Ok(check_a1_table(&inverse, &balls, opts))
}

/// The nodes `t ≥ 1`; (A1) and (A1)_Ω never look below.
fn upper_half(grid: &TGrid) -> Result<TGrid> {
    TGrid::from_samples(grid.samples()[grid.one_index()..].to_vec())
}

/// (A1)_Ω on an inverse table: the largest `β ∈ (0, 1]` with
/// `β^{|x−y| t^{1/n} + 1} φ⁻¹(y, t) ≤ φ⁻¹(x, t)` over all pairs and grid
/// `t ≥ 1`, i.e. `ln β = min −|ln v_x − ln v_y| / (|x−y| t^{1/n} + 1)`.
/// Same drift test as [`check_a1_table`].
pub fn check_a1_omega_table(inverse: &SampledFunction, opts: &CheckOptions) -> ConditionReport {
    let cloud = inverse.points();
    let grid = inverse.grid();
    let t = grid.samples();
    let one = grid.one_index();
    let split = half_split(grid);
    let nodes = t.len() - one;
    let n_half = t[one..].iter().take_while(|&&s| s <= split).count();
    let inv_n = 1.0 / cloud.dim() as f64;
    let tau: Vec<f64> = t[one..].iter().map(|s| s.powf(inv_n)).collect();
    let m = t.len();
    let lnv: Vec<f64> = (0..cloud.len())
        .flat_map(|i| (one..m).map(move |j| (i, j)))
        .map(|(i, j)| inverse.value(i, j).ln())
        .collect();
    let finite = lnv.iter().all(|v| v.is_finite());
    let row = |i: usize| &lnv[i * nodes..(i + 1) * nodes];

    // per pair: (min over t ≤ split, min over all t), both as ln β
    let pair_min = |a: usize, b: usize| -> (f64, f64) {
        let d = cloud.distance(a, b);
        let (ra, rb) = (row(a), row(b));
        let term = |j: usize| -> f64 {
            let (la, lb) = (ra[j], rb[j]);
            let diff = if finite || la.is_finite() && lb.is_finite() {
                (la - lb).abs()
            } else if la == lb {
                0.0
            } else {
                f64::INFINITY
            };
            -diff / (d * tau[j] + 1.0)
        };
        let lanes = |range: std::ops::Range<usize>| -> f64 {
            let mut acc = [0.0f64; 4];
            let mut j = range.start;
            while j + 4 <= range.end {
                for (k, a) in acc.iter_mut().enumerate() {
                    let v = term(j + k);
                    if v < *a {
                        *a = v;
                    }
                }
                j += 4;
            }
            let mut m = acc[0].min(acc[1]).min(acc[2].min(acc[3]));
            while j < range.end {
                m = m.min(term(j));
                j += 1;
            }
            m
        };
        let h = lanes(0..n_half);
        let r = lanes(n_half..nodes);
        (h, h.min(r))
    };

    let n = cloud.len();
    let best: Vec<((f64, usize, usize), (f64, usize, usize))> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut half = (0.0, a, a);
            let mut full = (0.0, a, a);
            for b in a + 1..n {
                let (h, f) = pair_min(a, b);
                if h < half.0 {
                    half = (h, a, b);
                }
                if f < full.0 {
                    full = (f, a, b);
                }
            }
            (half, full)
        })
        .collect();
    let mut half = (0.0, 0, 0);
    let mut full = (0.0, 0, 0);
    for (h, f) in best {
        if h.0 < half.0 {
            half = h;
        }
        if f.0 < full.0 {
            full = f;
        }
    }
    let beta = full.0.exp();
    let beta_half = half.0.exp();
    let holds = drift_verdict(beta, beta_half, opts.drift_tol);
    let lattice = Lattice::new(n, grid);

    let witness = (full.1 != full.2).then(|| {
        let (a, b) = (full.1, full.2);
        let d = cloud.distance(a, b);
        // the node where the pair attains its minimum
        let (ra, rb) = (row(a), row(b));
        let node = (0..nodes)
            .min_by(|&i, &j| {
                let f = |k: usize| {
                    let diff = if ra[k] == rb[k] { 0.0 } else { (ra[k] - rb[k]).abs() };
                    -diff / (d * tau[k] + 1.0)
                };
                f(i).total_cmp(&f(j))
            })
            .unwrap_or(0);
        let (va, vb) = (inverse.value(a, one + node), inverse.value(b, one + node));
        // x carries the smaller inverse value
        let (x, y, vx, vy) = if va <= vb { (a, b, va, vb) } else { (b, a, vb, va) };
        let tested = if holds {
            beta
        } else if beta_half > 0.0 {
            beta_half
        } else {
            f64::MIN_POSITIVE
        };
        let factor = tested.powf(d * tau[node] + 1.0);
        Witness::at(cloud, &[x, y], vec![t[one + node]]).with_inequality(tested, scaled(factor, vy), vx)
    });
    ConditionReport::new(
        ConditionId::A1Omega,
        holds,
        ExtReal::clamped(if holds { beta } else { 0.0 }),
        lattice,
    )
    .with_witness(witness)
    .with_detail(format!(
        "beta = {beta:.6e} over {} pairs; beta = {beta_half:.6e} for t <= {split:.3e}",
        n * (n.saturating_sub(1)) / 2
    ))
}

pub fn check_a1_omega(
    phi: &dyn PhiFunction,
    domain: &SpatialDomain,
    grid: &TGrid,
    opts: &CheckOptions,
) -> Result<ConditionReport> {
    let grid = upper_half(grid)?;
    let inverse = inverse_table(phi, domain.cloud(), &grid, opts.tol)?;
    Ok(check_a1_omega_table(&inverse, opts))
}
