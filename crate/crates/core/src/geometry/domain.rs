use crate::error::{Error, Result};
use crate::geometry::cloud::PointCloud;

/// A finite stand-in for a domain Ω ⊂ ℝⁿ.
///
/// `hat` indexes the subset used where the construction takes an infimum
/// over a dense subset; by default it is the whole cloud.
#[derive(Clone, Debug)]
pub struct SpatialDomain {
    cloud: PointCloud,
    hat: Vec<usize>,
    edges: Option<Vec<(usize, usize)>>,
    k: Option<f64>,
    bounded: bool,
    weights: Vec<f64>,
    label: String,
}

impl SpatialDomain {
    pub fn new(cloud: PointCloud, bounded: bool) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::Config("domain cloud is empty".into()));
        }
        let n = cloud.len();
        Ok(SpatialDomain {
            hat: (0..n).collect(),
            edges: None,
            k: None,
            bounded,
            weights: vec![1.0 / n as f64; n],
            label: "cloud".into(),
            cloud,
        })
    }

    pub fn with_hat(mut self, hat: Vec<usize>) -> Result<Self> {
        if hat.is_empty() {
            return Err(Error::Config("hat cloud is empty".into()));
        }
        if let Some(&bad) = hat.iter().find(|&&i| i >= self.cloud.len()) {
            return Err(Error::Config(format!("hat index {bad} out of range")));
        }
        self.hat = hat;
        Ok(self)
    }

    pub fn with_edges(mut self, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = self.cloud.len();
        if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| i >= n || j >= n) {
            return Err(Error::Config(format!("edge ({i}, {j}) leaves the cloud")));
        }
        self.edges = Some(edges);
        Ok(self)
    }

    /// Connects every point to its `k` nearest neighbours.
    pub fn with_knn_graph(self, k: usize) -> Self {
        let edges = knn_edges(&self.cloud, k);
        SpatialDomain {
            edges: Some(edges),
            ..self
        }
    }

    pub fn with_quasiconvexity(mut self, k: f64) -> Result<Self> {
        if !(k >= 1.0) {
            return Err(Error::Config(format!("quasi-convexity constant {k} < 1")));
        }
        self.k = Some(k);
        Ok(self)
    }

    /// Measure weights used by the L¹ proxy of (A2).
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.cloud.len() || weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::Config("weights must be finite, nonnegative, one per point".into()));
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.cloud.dim()
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn len(&self) -> usize {
        self.cloud.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }

    pub fn hat(&self) -> &[usize] {
        &self.hat
    }

    pub fn hat_cloud(&self) -> PointCloud {
        self.cloud.subset(&self.hat)
    }

    pub fn edges(&self) -> Option<&[(usize, usize)]> {
        self.edges.as_deref()
    }

    pub fn quasiconvexity(&self) -> Option<f64> {
        self.k
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Undirected `k`-nearest-neighbour edges, each listed once.
pub(crate) fn knn_edges(cloud: &PointCloud, k: usize) -> Vec<(usize, usize)> {
    let n = cloud.len();
    let mut edges = std::collections::BTreeSet::new();
    let mut scratch: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        scratch.clear();
        scratch.extend((0..n).filter(|&j| j != i).map(|j| (cloud.distance(i, j), j)));
        let kk = k.min(scratch.len());
        if kk == 0 {
            continue;
        }
        scratch.select_nth_unstable_by(kk - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in &scratch[..kk] {
            edges.insert((i.min(j), i.max(j)));
        }
    }
    edges.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_inputs() {
        assert!(SpatialDomain::new(PointCloud::new(2), true).is_err());
        let c = PointCloud::from_points(1, &[[0.0], [1.0]]).unwrap();
        let d = SpatialDomain::new(c, true).unwrap();
        assert!(d.clone().with_hat(vec![]).is_err());
        assert!(d.clone().with_hat(vec![5]).is_err());
        assert!(d.clone().with_edges(vec![(0, 2)]).is_err());
        assert!(d.clone().with_quasiconvexity(0.5).is_err());
        assert_eq!(d.with_knn_graph(3).edges().unwrap(), &[(0, 1)]);
    }
}
