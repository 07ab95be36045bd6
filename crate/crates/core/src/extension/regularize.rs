use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::SampledFunction;

/// `t^{1/p}`, the weight of the (Dec)_{1/p} regularization. Checks of the
/// exact property must use this same expression.
pub fn dec_weight(t: f64, p: f64) -> f64 {
    t.powf(1.0 / p)
}

/// `g(x, t) = t^{1/p} · min_{s ≤ t} f(x, s) / s^{1/p}` by one prefix-minimum
/// sweep per point.
///
/// After the sweep each value is nudged down by whole ulps where rounding
/// would otherwise let `g(t_i)/t_i^{1/p} < g(t_{i+1})/t_{i+1}^{1/p}`, so
/// the stored table satisfies (Dec)_{1/p} with no slack and `g ≤ f`.
pub fn regularize_g(f: &SampledFunction, p: f64) -> Result<SampledFunction> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Config(format!("regularization exponent p = {p} must be >= 1")));
    }
    let t = f.grid().samples();
    let w: Vec<f64> = t.iter().map(|&s| dec_weight(s, p)).collect();
    let rows: Vec<Vec<f64>> = (0..f.n_points())
        .into_par_iter()
        .map(|i| {
            let row = f.row(i);
            let mut g = Vec::with_capacity(row.len());
            let mut m = f64::INFINITY;
            for j in 0..row.len() {
                m = m.min(row[j] / w[j]);
                let mut v = (w[j] * m).min(row[j]);
                if j > 0 && v.is_finite() {
                    let bound = g[j - 1] / w[j - 1];
                    while v > 0.0 && v / w[j] > bound {
                        v = next_down(v);
                    }
                }
                g.push(v);
            }
            g
        })
        .collect();
    SampledFunction::new(f.points().clone(), f.grid().clone(), rows.concat())
}

fn next_down(v: f64) -> f64 {
    debug_assert!(v > 0.0 && v.is_finite());
    f64::from_bits(v.to_bits() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PointCloud;
    use crate::TGrid;

    fn table(grid: &TGrid, f: impl Fn(f64) -> f64) -> SampledFunction {
        let c = PointCloud::from_points(1, &[[0.0]]).unwrap();
        SampledFunction::new(c, grid.clone(), grid.samples().iter().map(|&t| f(t)).collect()).unwrap()
    }

    #[test]
    fn dec_input_is_unchanged() {
        let g = TGrid::default();
        let f = table(&g, |t| t.sqrt());
        let r = regularize_g(&f, 2.0).unwrap();
        for (a, b) in r.values().iter().zip(f.values()) {
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * b);
        }
    }

    #[test]
    fn bump_is_flattened() {
        let g = TGrid::geometric(1e-3, 1e3, 101).unwrap();
        let f = table(&g, |t| if (0.1..0.2).contains(&t) { 3.0 * t.sqrt() } else { t.sqrt() });
        let r = regularize_g(&f, 2.0).unwrap();
        for (j, &t) in g.samples().iter().enumerate() {
            assert!((r.value(0, j) - t.sqrt()).abs() < 1e-12 * t.sqrt().max(1.0));
        }
    }

    #[test]
    fn exact_dec_without_slack() {
        let g = TGrid::default();
        let f = table(&g, |t| t.powf(0.37) * (2.0 + (1.0 + t).ln().sin()));
        let p = 1.7;
        let r = regularize_g(&f, p).unwrap();
        let t = g.samples();
        for j in 1..t.len() {
            assert!(r.value(0, j - 1) / dec_weight(t[j - 1], p) >= r.value(0, j) / dec_weight(t[j], p));
            assert!(r.value(0, j) <= f.value(0, j));
        }
    }
}
