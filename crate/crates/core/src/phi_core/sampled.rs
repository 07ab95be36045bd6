use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::phi_core::grid::TGrid;
use crate::phi_core::phi::PhiFunction;

/// A table of values over `points × grid`, stored point-major.
///
/// Used for inverse tables `φ⁻¹(x, τ)` and for the `f` and `g` of the
/// extension. The sentinels are implicit: the value at `0` is `0` and the
/// value at `∞` is `∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    points: PointCloud,
    grid: TGrid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(points: PointCloud, grid: TGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != points.len() * grid.len() {
            return Err(Error::Structural(format!(
                "table has {} values, expected {} points x {} grid nodes",
                values.len(),
                points.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::Structural(format!(
                "table value {v} is outside [0, inf]"
            )));
        }
        Ok(SampledFunction {
            points,
            grid,
            values,
        })
    }

    /// Tabulates `φ(x, t)` itself over `points × grid`.
    pub fn tabulate(phi: &dyn PhiFunction, points: &PointCloud, grid: &TGrid) -> Result<Self> {
        let rows: Vec<Result<Vec<f64>>> = (0..points.len())
            .into_par_iter()
            .map(|i| {
                let x = points.point(i);
                grid.samples()
                    .iter()
                    .map(|&t| {
                        let v = phi.eval(x, t);
                        if v.is_nan() {
                            Err(Error::NotANumber { x: x.to_vec(), t })
                        } else if v < 0.0 {
                            Err(Error::Structural(format!("phi({x:?}, {t}) = {v} is negative")))
                        } else {
                            Ok(v)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut values = Vec::with_capacity(points.len() * grid.len());
        for row in rows {
            values.extend(row?);
        }
        SampledFunction::new(points.clone(), grid.clone(), values)
    }

    pub fn points(&self) -> &PointCloud {
        &self.points
    }

    pub fn grid(&self) -> &TGrid {
        &self.grid
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn value(&self, point: usize, node: usize) -> f64 {
        self.values[point * self.grid.len() + node]
    }

    pub fn row(&self, point: usize) -> &[f64] {
        let n = self.grid.len();
        &self.values[point * n..(point + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.grid.len())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at_zero(&self) -> f64 {
        0.0
    }

    pub fn value_at_infinity(&self) -> f64 {
        f64::INFINITY
    }

    /// Column at `t = 1`.
    pub fn at_one(&self) -> Vec<f64> {
        let j = self.grid.one_index();
        (0..self.n_points()).map(|i| self.value(i, j)).collect()
    }

    /// Sub-table on the given points, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> SampledFunction {
        let mut values = Vec::with_capacity(indices.len() * self.grid.len());
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        SampledFunction {
            points: self.points.subset(indices),
            grid: self.grid.clone(),
            values,
        }
    }

    /// Sub-table on the grid nodes in `range`.
    pub fn restrict_grid(&self, range: std::ops::Range<usize>) -> Result<SampledFunction> {
        let grid = TGrid::from_samples(self.grid.samples()[range.clone()].to_vec())?;
        let mut values = Vec::with_capacity(self.n_points() * grid.len());
        for row in self.rows() {
            values.extend_from_slice(&row[range.clone()]);
        }
        Ok(SampledFunction {
            points: self.points.clone(),
            grid,
            values,
        })
    }

    /// Pointwise `factor · self`.
    pub fn scaled(&self, factor: f64) -> SampledFunction {
        SampledFunction {
            points: self.points.clone(),
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}
