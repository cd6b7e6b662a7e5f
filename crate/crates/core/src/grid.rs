//! Tensor quadrature grids and sampled functions on them.
//!
//! A [`TensorGrid`] discretizes a product measure: each axis carries sorted
//! sample points and strictly positive cell measures. Functions are stored
//! as complex arrays whose axis `j` runs over grid axis `j`; axis 0 is the
//! innermost integration axis of every iterated norm.

use ndarray::{ArrayD, Dimension, IxDyn};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kahan::Kahan;

/// One axis of a tensor grid: points with their quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    points: Vec<f64>,
    measures: Vec<f64>,
}

impl GridAxis {
    pub fn new(points: Vec<f64>, measures: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("axis must have at least one point".into()));
        }
        if points.len() != measures.len() {
            return Err(Error::InvalidGrid(format!(
                "axis has {} points but {} measures",
                points.len(),
                measures.len()
            )));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("axis points must be strictly increasing".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidGrid("axis points must be finite".into()));
        }
        if measures.iter().any(|m| !m.is_finite() || *m <= 0.0) {
            return Err(Error::InvalidGrid(
                "cell measures must be finite and strictly positive".into(),
            ));
        }
        Ok(Self { points, measures })
    }

    /// Uniform axis on `[lo, hi]` with `n` midpoint cells of measure
    /// `(hi-lo)/n`.
    pub fn uniform_cells(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 0 || !(lo < hi) {
            return Err(Error::InvalidGrid(format!(
                "uniform axis needs n >= 1 and lo < hi, got n={n}, [{lo}, {hi}]"
            )));
        }
        let h = (hi - lo) / n as f64;
        let points = (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect();
        Ok(Self {
            points,
            measures: vec![h; n],
        })
    }

    /// Uniform axis with `n` nodes at `lo, lo+h, …, hi` and measure `h`
    /// each (rectangle rule on an unbounded integrand that has decayed by
    /// the endpoints).
    pub fn uniform_nodes(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(lo < hi) {
            return Err(Error::InvalidGrid(format!(
                "uniform node axis needs n >= 2 and lo < hi, got n={n}, [{lo}, {hi}]"
            )));
        }
        let h = (hi - lo) / (n - 1) as f64;
        let points = (0..n).map(|i| lo + i as f64 * h).collect();
        Ok(Self {
            points,
            measures: vec![h; n],
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    /// Σ of cell measures.
    pub fn total_measure(&self) -> f64 {
        let mut acc = Kahan::new();
        for &m in &self.measures {
            acc.add(m);
        }
        acc.value()
    }

    /// Largest step between consecutive points (0 for a single point).
    pub fn max_step(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

/// Discretized product measure `μ = μ_1 ⊗ … ⊗ μ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid {
    axes: Vec<GridAxis>,
}

impl TensorGrid {
    pub fn new(axes: Vec<GridAxis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidGrid("grid needs at least one axis".into()));
        }
        Ok(Self { axes })
    }

    /// `n` unit-measure cells per axis, labelled `0.5, 1.5, …` — handy for
    /// counting-measure style tests.
    pub fn unit_cells(cells_per_axis: &[usize]) -> Result<Self> {
        let axes = cells_per_axis
            .iter()
            .map(|&n| GridAxis::uniform_cells(0.0, n as f64, n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, j: usize) -> &GridAxis {
        &self.axes[j]
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(GridAxis::len).collect()
    }

    pub fn n_cells(&self) -> usize {
        self.axes.iter().map(GridAxis::len).product()
    }

    /// Product of per-axis total measures.
    pub fn total_measure(&self) -> f64 {
        self.axes.iter().map(GridAxis::total_measure).product()
    }

    /// Measure of the cell at a multi-index.
    pub fn cell_measure(&self, index: &[usize]) -> f64 {
        index
            .iter()
            .zip(&self.axes)
            .map(|(&i, ax)| ax.measures()[i])
            .product()
    }

    /// Concatenate the axes of two grids (time axes followed by frequency
    /// axes, say).
    pub fn product(&self, other: &TensorGrid) -> TensorGrid {
        let mut axes = self.axes.clone();
        axes.extend(other.axes.iter().cloned());
        TensorGrid { axes }
    }
}

/// Complex samples over a [`TensorGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: ArrayD<Complex64>,
}

impl GridFunction {
    pub fn new(grid: &TensorGrid, values: ArrayD<Complex64>) -> Result<Self> {
        if values.shape() != grid.shape().as_slice() {
            return Err(Error::DimensionMismatch(format!(
                "values of shape {:?} on a grid of shape {:?}",
                values.shape(),
                grid.shape()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidValues("values must be finite".into()));
        }
        Ok(Self { values })
    }

    pub fn zeros(grid: &TensorGrid) -> Self {
        Self {
            values: ArrayD::zeros(IxDyn(&grid.shape())),
        }
    }

    /// Sample a pointwise-defined function on the grid.
    pub fn from_fn(grid: &TensorGrid, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Self> {
        let shape = grid.shape();
        let mut values = ArrayD::zeros(IxDyn(&shape));
        let mut point = vec![0.0; grid.dim()];
        for (idx, v) in values.indexed_iter_mut() {
            for (j, p) in point.iter_mut().enumerate() {
                *p = grid.axis(j).points()[idx[j]];
            }
            *v = f(&point);
        }
        Self::new(grid, values)
    }

    /// Sample a real 1-d profile on a 1-axis grid.
    pub fn from_real_1d(grid: &TensorGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "expected a 1-axis grid, got {} axes",
                grid.dim()
            )));
        }
        Self::from_fn(grid, |x| Complex64::new(f(x[0]), 0.0))
    }

    pub fn values(&self) -> &ArrayD<Complex64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut ArrayD<Complex64> {
        &mut self.values
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            values: self.values.mapv(|z| z * c),
        }
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        if self.values.shape() != other.values.shape() {
            return Err(Error::DimensionMismatch(
                "cannot add functions with different shapes".into(),
            ));
        }
        Ok(Self {
            values: &self.values + &other.values,
        })
    }

    /// Discrete `L^2` norm with the grid's cell measures.
    pub fn l2_norm(&self, grid: &TensorGrid) -> f64 {
        let mut acc = Kahan::new();
        for (idx, z) in self.values.indexed_iter() {
            acc.add(z.norm_sqr() * grid.cell_measure(idx.slice()));
        }
        acc.value().sqrt()
    }

    /// Discrete `L^1` norm.
    pub fn l1_norm(&self, grid: &TensorGrid) -> f64 {
        let mut acc = Kahan::new();
        for (idx, z) in self.values.indexed_iter() {
            acc.add(z.norm() * grid.cell_measure(idx.slice()));
        }
        acc.value()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
