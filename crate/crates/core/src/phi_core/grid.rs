use crate::error::{Error, Result};

/// Sampled `t`-axis.
///
/// Strictly increasing positive samples that always contain `1` exactly. The
/// sentinels `0` and `∞` are not stored; callers handle them symbolically.
#[derive(Clone, Debug, PartialEq)]
pub struct TGrid {
    samples: Vec<f64>,
    one: usize,
}

impl TGrid {
    pub const DEFAULT_MIN: f64 = 1e-6;
    pub const DEFAULT_MAX: f64 = 1e6;
    pub const DEFAULT_COUNT: usize = 1201;

    /// `count` geometric samples from `min` to `max`, plus `1` exactly.
    ///
    /// A geometric node within `1e-9` of one is replaced by `1.0`, so the
    /// default grid has exactly 1201 nodes.
    pub fn geometric(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min > 0.0 && max.is_finite() && min < max) {
            return Err(Error::Config(format!(
                "grid bounds must satisfy 0 < min < max < inf (got {min}, {max})"
            )));
        }
        if !(min <= 1.0 && 1.0 <= max) {
            return Err(Error::Config(format!(
                "grid [{min}, {max}] must contain 1"
            )));
        }
        if count < 2 {
            return Err(Error::Config(format!("grid count must be >= 2 (got {count})")));
        }
        let (lmin, lmax) = (min.ln(), max.ln());
        let step = (lmax - lmin) / (count - 1) as f64;
        let mut samples: Vec<f64> = (0..count)
            .map(|i| {
                if i == 0 {
                    min
                } else if i == count - 1 {
                    max
                } else {
                    (lmin + step * i as f64).exp()
                }
            })
            .collect();
        match samples.iter().position(|&t| (t - 1.0).abs() <= 1e-9) {
            Some(i) => samples[i] = 1.0,
            None => {
                let at = samples.partition_point(|&t| t < 1.0);
                samples.insert(at, 1.0);
            }
        }
        Self::from_samples(samples)
    }

    /// Validates an explicit sample list.
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Config("grid is empty".into()));
        }
        for w in samples.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Config(format!(
                    "grid samples must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if !(samples[0] > 0.0) || !samples[samples.len() - 1].is_finite() {
            return Err(Error::Config("grid samples must be positive and finite".into()));
        }
        let one = samples
            .iter()
            .position(|&t| t == 1.0)
            .ok_or_else(|| Error::Config("grid must contain 1 exactly".into()))?;
        Ok(TGrid { samples, one })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.samples[0]
    }

    pub fn max(&self) -> f64 {
        self.samples[self.samples.len() - 1]
    }

    /// Index of the node `t = 1`.
    pub fn one_index(&self) -> usize {
        self.one
    }

    /// Inserts the geometric midpoint between every pair of nodes. The
    /// result is a superset of `self`.
    pub fn refine(&self) -> Self {
        let mut out = Vec::with_capacity(2 * self.samples.len());
        for w in self.samples.windows(2) {
            out.push(w[0]);
            out.push((w[0] * w[1]).sqrt());
        }
        out.push(self.max());
        TGrid::from_samples(out).expect("refinement keeps grid invariants")
    }

    /// The nodes in `[lo, hi]`, as an index range.
    pub fn index_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let a = self.samples.partition_point(|&t| t < lo);
        let b = self.samples.partition_point(|&t| t <= hi);
        a..b.max(a)
    }
}

impl Default for TGrid {
    fn default() -> Self {
        TGrid::geometric(Self::DEFAULT_MIN, Self::DEFAULT_MAX, Self::DEFAULT_COUNT)
            .expect("default grid is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = TGrid::default();
        assert_eq!(g.len(), 1201);
        assert_eq!(g.samples()[g.one_index()], 1.0);
        assert_eq!(g.one_index(), 600);
        assert_eq!(g.min(), 1e-6);
        assert_eq!(g.max(), 1e6);
    }

    #[test]
    fn one_is_inserted_when_missing() {
        let g = TGrid::geometric(0.1, 10.0, 4).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.samples()[g.one_index()], 1.0);
    }

    #[test]
    fn refine_is_superset() {
        let g = TGrid::geometric(1e-2, 1e2, 41).unwrap();
        let r = g.refine();
        assert_eq!(r.len(), 81);
        for t in g.samples() {
            assert!(r.samples().contains(t));
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TGrid::from_samples(vec![0.5, 2.0]).is_err());
        assert!(TGrid::from_samples(vec![1.0, 1.0]).is_err());
        assert!(TGrid::geometric(2.0, 3.0, 10).is_err());
    }
}
