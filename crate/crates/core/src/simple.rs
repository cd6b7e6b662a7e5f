//! Simple functions: finite combinations of disjoint product boxes.
//!
//! A box is an axis-aligned product of half-open cell-index intervals on a
//! shared [`TensorGrid`]. Boxes are the carriers of the closed-form norm
//! and of the finite-rank approximation operator.

use ndarray::IxDyn;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, TensorGrid};

/// Product of per-axis half-open index intervals `[lo, hi)` into the cells
/// of a tensor grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxRegion {
    intervals: Vec<(usize, usize)>,
}

impl BoxRegion {
    pub fn new(intervals: Vec<(usize, usize)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidValues("box needs at least one axis".into()));
        }
        for &(lo, hi) in &intervals {
            if lo >= hi {
                return Err(Error::InvalidValues(format!(
                    "box interval [{lo}, {hi}) is empty; zero-measure boxes are rejected"
                )));
            }
        }
        Ok(Self { intervals })
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(usize, usize)] {
        &self.intervals
    }

    pub fn check_on_grid(&self, grid: &TensorGrid) -> Result<()> {
        if self.dim() != grid.dim() {
            return Err(Error::DimensionMismatch(format!(
                "box has {} axes on a {}-axis grid",
                self.dim(),
                grid.dim()
            )));
        }
        for (j, &(_, hi)) in self.intervals.iter().enumerate() {
            if hi > grid.axis(j).len() {
                return Err(Error::InvalidValues(format!(
                    "box interval ends at {hi} but axis {j} has {} cells",
                    grid.axis(j).len()
                )));
            }
        }
        Ok(())
    }

    /// `μ_j` of the box's interval on axis `j`.
    pub fn axis_measure(&self, grid: &TensorGrid, j: usize) -> f64 {
        let (lo, hi) = self.intervals[j];
        grid.axis(j).measures()[lo..hi].iter().sum()
    }

    /// Product measure of the box.
    pub fn measure(&self, grid: &TensorGrid) -> f64 {
        (0..self.dim()).map(|j| self.axis_measure(grid, j)).product()
    }

    /// Whether two boxes are disjoint as product sets: disjoint on at least
    /// one axis.
    pub fn disjoint(&self, other: &BoxRegion) -> bool {
        self.intervals
            .iter()
            .zip(&other.intervals)
            .any(|(&(lo1, hi1), &(lo2, hi2))| hi1 <= lo2 || hi2 <= lo1)
    }

    /// Intervals disjoint on *every* axis (a strictly stronger property
    /// than set disjointness).
    pub fn axiswise_disjoint(&self, other: &BoxRegion) -> bool {
        self.intervals
            .iter()
            .zip(&other.intervals)
            .all(|(&(lo1, hi1), &(lo2, hi2))| hi1 <= lo2 || hi2 <= lo1)
    }

    pub fn intersect(&self, other: &BoxRegion) -> Option<BoxRegion> {
        let mut intervals = Vec::with_capacity(self.dim());
        for (&(lo1, hi1), &(lo2, hi2)) in self.intervals.iter().zip(&other.intervals) {
            let lo = lo1.max(lo2);
            let hi = hi1.min(hi2);
            if lo >= hi {
                return None;
            }
            intervals.push((lo, hi));
        }
        Some(BoxRegion { intervals })
    }

    pub fn contains_index(&self, index: &[usize]) -> bool {
        self.intervals
            .iter()
            .zip(index)
            .all(|(&(lo, hi), &i)| lo <= i && i < hi)
    }

    /// Visit every cell multi-index of the box in row-major order.
    pub fn for_each_cell(&self, mut f: impl FnMut(&[usize])) {
        let mut idx: Vec<usize> = self.intervals.iter().map(|&(lo, _)| lo).collect();
        loop {
            f(&idx);
            let mut axis = self.dim();
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < self.intervals[axis].1 {
                    break;
                }
                idx[axis] = self.intervals[axis].0;
            }
        }
    }

    pub(crate) fn check_pairwise_disjoint(boxes: &[BoxRegion]) -> Result<()> {
        for i in 0..boxes.len() {
            for j in (i + 1)..boxes.len() {
                if !boxes[i].disjoint(&boxes[j]) {
                    return Err(Error::BoxOverlap(format!("boxes {i} and {j} intersect")));
                }
            }
        }
        Ok(())
    }
}

/// `f = Σ_k λ_k 1_{B_k}` over pairwise disjoint boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleFunction {
    boxes: Vec<BoxRegion>,
    coeffs: Vec<Complex64>,
}

impl SimpleFunction {
    pub fn new(boxes: Vec<BoxRegion>, coeffs: Vec<Complex64>) -> Result<Self> {
        if boxes.len() != coeffs.len() {
            return Err(Error::InvalidValues(format!(
                "{} boxes but {} coefficients",
                boxes.len(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidValues("coefficients must be finite".into()));
        }
        BoxRegion::check_pairwise_disjoint(&boxes)?;
        Ok(Self { boxes, coeffs })
    }

    /// The zero function (no boxes).
    pub fn zero() -> Self {
        Self {
            boxes: Vec::new(),
            coeffs: Vec::new(),
        }
    }

    pub fn boxes(&self) -> &[BoxRegion] {
        &self.boxes
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            boxes: self.boxes.clone(),
            coeffs: self.coeffs.iter().map(|&l| l * c).collect(),
        }
    }

    /// Whether the boxes are pairwise disjoint on the given axis; the
    /// closed-form norm requires this on the outermost axis.
    pub fn axis_disjoint(&self, axis: usize) -> bool {
        for i in 0..self.boxes.len() {
            for j in (i + 1)..self.boxes.len() {
                let (lo1, hi1) = self.boxes[i].intervals()[axis];
                let (lo2, hi2) = self.boxes[j].intervals()[axis];
                if !(hi1 <= lo2 || hi2 <= lo1) {
                    return false;
                }
            }
        }
        true
    }

    /// Dense samples on the grid.
    pub fn to_grid_function(&self, grid: &TensorGrid) -> Result<GridFunction> {
        let mut out = GridFunction::zeros(grid);
        for (b, &c) in self.boxes.iter().zip(&self.coeffs) {
            b.check_on_grid(grid)?;
            b.for_each_cell(|idx| out.values_mut()[IxDyn(idx)] = c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(intervals: &[(usize, usize)]) -> BoxRegion {
        BoxRegion::new(intervals.to_vec()).unwrap()
    }

    #[test]
    fn empty_interval_is_rejected() {
        assert!(BoxRegion::new(vec![(2, 2)]).is_err());
        assert!(BoxRegion::new(vec![(3, 1)]).is_err());
    }

    #[test]
    fn disjointness_needs_only_one_axis() {
        let a = bx(&[(0, 1), (0, 2)]);
        let b = bx(&[(1, 2), (0, 2)]);
        assert!(a.disjoint(&b));
        assert!(!a.axiswise_disjoint(&b));
    }

    #[test]
    fn overlapping_boxes_rejected() {
        let a = bx(&[(0, 2), (0, 2)]);
        let b = bx(&[(1, 3), (1, 3)]);
        assert!(!a.disjoint(&b));
        let sf = SimpleFunction::new(vec![a, b], vec![Complex64::new(1.0, 0.0); 2]);
        assert!(matches!(sf, Err(Error::BoxOverlap(_))));
    }

    #[test]
    fn sampling_fills_the_right_cells() {
        let grid = TensorGrid::unit_cells(&[3, 3]).unwrap();
        let sf = SimpleFunction::new(
            vec![bx(&[(0, 1), (0, 2)]), bx(&[(2, 3), (2, 3)])],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)],
        )
        .unwrap();
        let g = sf.to_grid_function(&grid).unwrap();
        assert_eq!(g.values()[[0, 0]], Complex64::new(1.0, 0.0));
        assert_eq!(g.values()[[0, 1]], Complex64::new(1.0, 0.0));
        assert_eq!(g.values()[[2, 2]], Complex64::new(0.0, 2.0));
        assert_eq!(g.values()[[1, 1]], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn measures_multiply() {
        let grid = TensorGrid::new(vec![
            crate::grid::GridAxis::uniform_cells(0.0, 4.0, 2).unwrap(),
            crate::grid::GridAxis::uniform_cells(0.0, 3.0, 3).unwrap(),
        ])
        .unwrap();
        let b = bx(&[(0, 2), (1, 3)]);
        assert!((b.measure(&grid) - 8.0).abs() < 1e-14);
    }
}
