use crate::error::{Error, Result};

/// Euclidean distance.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// A point of ℝⁿ with finite coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Config("point has no coordinates".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config(format!("point {coords:?} has non-finite coordinates")));
        }
        Ok(Point(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A finite set of points in ℝⁿ, stored flat.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        PointCloud {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut cloud = PointCloud::new(dim);
        for p in points {
            cloud.try_push(p.as_ref())?;
        }
        Ok(cloud)
    }

    pub fn try_push(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::Config(format!(
                "point {p:?} has dimension {}, expected {}",
                p.len(),
                self.dim
            )));
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config(format!("point {p:?} has non-finite coordinates")));
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + Clone {
        self.coords.chunks_exact(self.dim)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        distance(self.point(i), self.point(j))
    }

    pub fn subset(&self, indices: &[usize]) -> PointCloud {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        PointCloud {
            dim: self.dim,
            coords,
        }
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &PointCloud) -> PointCloud {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        PointCloud {
            dim: self.dim,
            coords,
        }
    }

    /// Distance from each point to its nearest other point (`∞` for a
    /// single point). Brute force.
    pub fn nearest_neighbor_distances(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                (0..self.len())
                    .filter(|&j| j != i)
                    .map(|j| self.distance(i, j))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// Smallest positive nearest-neighbour distance.
    pub fn resolution(&self) -> f64 {
        self.nearest_neighbor_distances()
            .into_iter()
            .filter(|d| *d > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn norms(&self) -> Vec<f64> {
        self.iter()
            .map(|p| p.iter().map(|c| c * c).sum::<f64>().sqrt())
            .collect()
    }

    /// Axis-aligned bounding box `(lower, upper)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_validates() {
        let mut c = PointCloud::new(2);
        assert!(c.try_push(&[1.0]).is_err());
        assert!(c.try_push(&[1.0, f64::NAN]).is_err());
        c.try_push(&[0.0, 0.0]).unwrap();
        c.try_push(&[3.0, 4.0]).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.distance(0, 1), 5.0);
        assert_eq!(c.resolution(), 5.0);
    }

    #[test]
    fn subset_and_concat() {
        let c = PointCloud::from_points(1, &[[0.0], [1.0], [2.0]]).unwrap();
        let s = c.subset(&[2, 0]);
        assert_eq!(s.point(0), &[2.0]);
        assert_eq!(c.concat(&s).len(), 5);
    }
}
