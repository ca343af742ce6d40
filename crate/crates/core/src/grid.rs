//! Uniform grids on `[0, 1]` and profiles sampled on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid `x_i = i / n_cells`, `i = 0..=n_cells`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct SpatialGrid {
    n_cells: usize,
}

impl SpatialGrid {
    /// At least two cells are needed for the one-sided boundary stencils.
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 cells, got {n_cells}"
            )));
        }
        Ok(Self { n_cells })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    /// Node `i`, computed as `i / n` so that the last node is exactly 1.
    pub fn x(&self, i: usize) -> f64 {
        i as f64 / self.n_cells as f64
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_cells + 1).map(move |i| self.x(i))
    }
}

impl TryFrom<usize> for SpatialGrid {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        SpatialGrid::new(n)
    }
}

impl From<SpatialGrid> for usize {
    fn from(grid: SpatialGrid) -> usize {
        grid.n_cells
    }
}

/// A state profile `u[t]` sampled at the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridProfile {
    grid: SpatialGrid,
    values: Vec<f64>,
}

impl GridProfile {
    pub fn new(grid: SpatialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::ProfileLength {
                expected: grid.n_nodes(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonfiniteProfile(i));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n_nodes()],
        }
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect())
    }


    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn left(&self) -> f64 {
        self.values[0]
    }

    pub fn right(&self) -> f64 {
        self.values[self.grid.n_cells]
    }

    /// `max_i |u_i|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// L² norm by the composite trapezoid rule.
    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.h();
        let n = self.grid.n_cells;
        let inner: f64 = self.values[1..n].iter().map(|v| v * v).sum();
        let ends = 0.5 * (self.values[0].powi(2) + self.values[n].powi(2));
        ((inner + ends) * h).sqrt()
    }

    /// Second-order one-sided derivative at `x = 0`.
    pub fn left_derivative(&self) -> f64 {
        let u = &self.values;
        (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * self.grid.h())
    }

    /// Second-order one-sided derivative at `x = 1`.
    pub fn right_derivative(&self) -> f64 {
        let u = &self.values;
        let n = self.grid.n_cells;
        (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * self.grid.h())
    }

    /// Centered first difference at interior node `i`, one-sided at the ends.
    pub fn derivative_at(&self, i: usize) -> f64 {
        let n = self.grid.n_cells;
        match i {
            0 => self.left_derivative(),
            i if i == n => self.right_derivative(),
            i => (self.values[i + 1] - self.values[i - 1]) / (2.0 * self.grid.h()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        for n in [2, 3, 7, 64, 255, 1000] {
            let g = SpatialGrid::new(n).unwrap();
            assert_eq!(g.x(0), 0.0);
            assert_eq!(g.x(n), 1.0);
            let xs: Vec<f64> = g.nodes().collect();
            assert!(xs.windows(2).all(|w| w[0] < w[1]));
            assert!((g.h() * n as f64 - 1.0).abs() <= f64::EPSILON);
        }
    }

    #[test]
    fn rejects_tiny_grid_and_bad_profiles() {
        assert!(SpatialGrid::new(1).is_err());
        let g = SpatialGrid::new(4).unwrap();
        assert!(matches!(
            GridProfile::new(g, vec![0.0; 4]),
            Err(Error::ProfileLength { .. })
        ));
        assert!(matches!(
            GridProfile::new(g, vec![0.0, 1.0, f64::NAN, 0.0, 0.0]),
            Err(Error::NonfiniteProfile(2))
        ));
    }

    #[test]
    fn one_sided_derivatives_exact_for_quadratics() {
        let g = SpatialGrid::new(10).unwrap();
        let p = GridProfile::from_fn(g, |x| 3.0 * x * x - x + 2.0).unwrap();
        assert!((p.left_derivative() + 1.0).abs() < 1e-12);
        assert!((p.right_derivative() - 5.0).abs() < 1e-12);
        assert!((p.derivative_at(5) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn l2_norm_of_constant() {
        let g = SpatialGrid::new(16).unwrap();
        let p = GridProfile::from_fn(g, |_| 2.0).unwrap();
        assert!((p.l2_norm() - 2.0).abs() < 1e-14);
    }
}
