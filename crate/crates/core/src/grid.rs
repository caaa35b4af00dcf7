//! Equispaced grids, nodal functions and the two first-derivative stencils.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{c64, ComplexMatrix, ComplexVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    a: f64,
    b: f64,
    n: usize,
}

impl SpatialGrid {
    /// `n` cells on `[a, b]`, i.e. `n + 1` nodes.
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidArgument(format!(
                "interval [{a}, {b}] is not proper"
            )));
        }
        if n < 1 {
            return Err(Error::InvalidArgument(
                "grid needs at least one cell".into(),
            ));
        }
        Ok(Self { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> usize {
        self.n + 1
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.b
        } else {
            self.a + i as f64 * self.h()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(|i| self.node(i))
    }

    /// Trapezoid weights, which are also the diagonal SBP norm.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.h();
        (0..=self.n)
            .map(|i| if i == 0 || i == self.n { 0.5 * h } else { h })
            .collect()
    }

    /// Second-order SBP first-derivative matrix: central interior rows and
    /// one-sided first-order boundary rows, so that
    /// `H D + D^T H = diag(-1, 0, ..., 0, 1)` with `H` the trapezoid norm.
    pub fn sbp_derivative(&self) -> DMatrix<f64> {
        let n = self.n;
        let h = self.h();
        let mut d = DMatrix::zeros(n + 1, n + 1);
        d[(0, 0)] = -1.0 / h;
        d[(0, 1)] = 1.0 / h;
        for i in 1..n {
            d[(i, i - 1)] = -0.5 / h;
            d[(i, i + 1)] = 0.5 / h;
        }
        d[(n, n - 1)] = -1.0 / h;
        d[(n, n)] = 1.0 / h;
        d
    }
}

/// `d`-vector valued function sampled at the nodes of a grid. Values are
/// stored one node per column, so the flat storage is node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: SpatialGrid,
    values: ComplexMatrix,
}

impl GridFunction {
    pub fn new(grid: SpatialGrid, values: ComplexMatrix) -> Result<Self> {
        if values.ncols() != grid.nodes() || values.nrows() == 0 {
            return Err(Error::Shape(format!(
                "grid function on {} nodes needs d x {} values, got {}x{}",
                grid.nodes(),
                grid.nodes(),
                values.nrows(),
                values.ncols()
            )));
        }
        crate::numerics::ensure_finite(&values, "grid function")?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: SpatialGrid, d: usize) -> Self {
        Self {
            grid,
            values: ComplexMatrix::zeros(d, grid.nodes()),
        }
    }

    pub fn from_fn(grid: SpatialGrid, d: usize, mut f: impl FnMut(f64) -> ComplexVector) -> Self {
        let mut values = ComplexMatrix::zeros(d, grid.nodes());
        for (i, xi) in grid.points().enumerate() {
            let v = f(xi);
            assert_eq!(v.len(), d, "sample has wrong dimension");
            values.set_column(i, &v);
        }
        Self { grid, values }
    }

    /// Scalar profile times a fixed direction vector.
    pub fn from_profile(
        grid: SpatialGrid,
        direction: &ComplexVector,
        f: impl Fn(f64) -> Complex64,
    ) -> Self {
        Self::from_fn(grid, direction.len(), |xi| direction * f(xi))
    }

    pub fn from_flat(grid: SpatialGrid, d: usize, flat: &ComplexVector) -> Result<Self> {
        if flat.len() != d * grid.nodes() {
            return Err(Error::Shape(format!(
                "flat state has length {}, expected {}",
                flat.len(),
                d * grid.nodes()
            )));
        }
        Self::new(
            grid,
            ComplexMatrix::from_column_slice(d, grid.nodes(), flat.as_slice()),
        )
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &ComplexMatrix {
        &self.values
    }

    pub fn at(&self, i: usize) -> ComplexVector {
        self.values.column(i).into_owned()
    }

    pub fn first(&self) -> ComplexVector {
        self.at(0)
    }

    pub fn last(&self) -> ComplexVector {
        self.at(self.grid.cells())
    }

    pub fn flatten(&self) -> ComplexVector {
        ComplexVector::from_column_slice(self.values.as_slice())
    }

    pub fn map_nodes(&self, mut f: impl FnMut(usize, ComplexVector) -> ComplexVector) -> Self {
        let mut values = self.values.clone();
        for i in 0..self.grid.nodes() {
            let v = f(i, self.at(i));
            values.set_column(i, &v);
        }
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        Self {
            grid: self.grid,
            values: &self.values + &other.values,
        }
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        Self {
            grid: self.grid,
            values: &self.values - &other.values,
        }
    }

    pub fn scaled(&self, s: Complex64) -> GridFunction {
        Self {
            grid: self.grid,
            values: &self.values * s,
        }
    }

    /// Trapezoid `L^2` inner product `<self, other>`, linear in `self`.
    pub fn inner_l2(&self, other: &GridFunction) -> Complex64 {
        let w = self.grid.trapezoid_weights();
        (0..self.grid.nodes())
            .map(|i| other.values.column(i).dotc(&self.values.column(i)) * w[i])
            .sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.inner_l2(self).re.max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        crate::numerics::max_abs(&self.values)
    }

    /// Derivative with second-order one-sided closures at both ends; exact on
    /// quadratics. Falls back to a two-point difference on a single cell.
    pub fn derivative(&self) -> GridFunction {
        let n = self.grid.cells();
        let h = self.grid.h();
        let v = &self.values;
        let mut out = ComplexMatrix::zeros(v.nrows(), v.ncols());
        if n == 1 {
            let slope = (v.column(1) - v.column(0)) / c64(h, 0.0);
            out.set_column(0, &slope);
            out.set_column(1, &slope);
        } else {
            let s = c64(0.5 / h, 0.0);
            out.set_column(
                0,
                &((v.column(1) * c64(4.0, 0.0) - v.column(0) * c64(3.0, 0.0) - v.column(2)) * s),
            );
            for i in 1..n {
                out.set_column(i, &((v.column(i + 1) - v.column(i - 1)) * s));
            }
            out.set_column(
                n,
                &((v.column(n) * c64(3.0, 0.0) - v.column(n - 1) * c64(4.0, 0.0)
                    + v.column(n - 2))
                    * s),
            );
        }
        GridFunction {
            grid: self.grid,
            values: out,
        }
    }
}
