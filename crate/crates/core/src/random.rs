//! Seeded generators for randomized certificates and test suites.
//!
//! Everything here is a pure function of the passed [`SplitMix64`] stream,
//! so certificates are reproducible from a single seed.

use num_complex::Complex64;

use crate::approx_operator::{PartitionBox, PartitionSpec};
use crate::grid::{GridAxis, GridFunction, TensorGrid};
use crate::rng::SplitMix64;
use crate::simple::SimpleFunction;

/// Grid with the given cell counts and random cell measures in `[0.4, 1.6)`.
pub fn grid(rng: &mut SplitMix64, cells_per_axis: &[usize]) -> TensorGrid {
    let axes = cells_per_axis
        .iter()
        .map(|&n| {
            let points = (0..n).map(|i| i as f64 + 0.5).collect();
            let measures = (0..n).map(|_| rng.uniform_in(0.4, 1.6)).collect();
            GridAxis::new(points, measures).expect("positive measures")
        })
        .collect();
    TensorGrid::new(axes).expect("non-empty axes")
}

/// `count` disjoint intervals covering random contiguous blocks of an axis
/// with `len` cells; requires `len >= count`.
pub fn axis_intervals(rng: &mut SplitMix64, len: usize, count: usize) -> Vec<(usize, usize)> {
    assert!(len >= count && count >= 1);
    // Random split points 0 = b_0 < b_1 < … < b_count = len.
    let mut cuts: Vec<usize> = (1..len).collect();
    rng.shuffle(&mut cuts);
    let mut picked: Vec<usize> = cuts.into_iter().take(count - 1).collect();
    picked.push(0);
    picked.push(len);
    picked.sort_unstable();
    picked
        .windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            // Shrink from the right now and then so intervals need not
            // tile the axis.
            let width = hi - lo;
            let keep = if width > 1 && rng.uniform() < 0.3 {
                rng.usize_in(1, width - 1)
            } else {
                width
            };
            (lo, lo + keep)
        })
        .collect()
}

/// How boxes are selected out of the tensor family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// All cells of the tensor family.
    Full,
    /// One box per interval index, matched through random per-axis
    /// permutations (boxes pairwise disjoint on every axis).
    Permutation,
}

/// Random partition with `count` intervals per axis; weighted draws take
/// `γ` log-uniform in `[e^{-1.5}, e^{1.5}]`.
pub fn partition(
    rng: &mut SplitMix64,
    grid: &TensorGrid,
    count: usize,
    selection: Selection,
    weighted: bool,
) -> PartitionSpec {
    let intervals: Vec<Vec<(usize, usize)>> = (0..grid.dim())
        .map(|j| axis_intervals(rng, grid.axis(j).len(), count))
        .collect();
    match selection {
        Selection::Full => {
            let total: usize = intervals.iter().map(Vec::len).product();
            let gammas = weighted.then(|| {
                (0..total)
                    .map(|_| rng.uniform_in(-1.5, 1.5).exp())
                    .collect()
            });
            PartitionSpec::full_tensor(intervals, gammas).expect("valid random partition")
        }
        Selection::Permutation => {
            let n = grid.dim();
            let mut perms: Vec<Vec<usize>> = Vec::with_capacity(n);
            perms.push((0..count).collect());
            for _ in 1..n {
                let mut p: Vec<usize> = (0..count).collect();
                rng.shuffle(&mut p);
                perms.push(p);
            }
            let boxes = (0..count)
                .map(|i| PartitionBox {
                    cell: (0..n).map(|j| perms[j][i]).collect(),
                    gamma: if weighted {
                        rng.uniform_in(-1.5, 1.5).exp()
                    } else {
                        1.0
                    },
                })
                .collect();
            PartitionSpec::new(intervals, boxes).expect("valid random partition")
        }
    }
}

/// Simple function subordinate to the partition: one complex-normal
/// coefficient per box.
pub fn subordinate_simple(rng: &mut SplitMix64, part: &PartitionSpec) -> SimpleFunction {
    let regions = part.regions();
    let coeffs = (0..regions.len()).map(|_| rng.complex_normal()).collect();
    SimpleFunction::new(regions, coeffs).expect("partition boxes are disjoint")
}

/// Simple function on a refinement: each partition box is split in half
/// along every axis that spans more than one cell, with independent
/// coefficients per sub-box.
pub fn refined_simple(rng: &mut SplitMix64, part: &PartitionSpec) -> SimpleFunction {
    let mut boxes = Vec::new();
    let mut coeffs = Vec::new();
    for region in part.regions() {
        let splits: Vec<Vec<(usize, usize)>> = region
            .intervals()
            .iter()
            .map(|&(lo, hi)| {
                if hi - lo >= 2 {
                    let mid = rng.usize_in(lo + 1, hi - 1);
                    vec![(lo, mid), (mid, hi)]
                } else {
                    vec![(lo, hi)]
                }
            })
            .collect();
        let mut idx = vec![0usize; splits.len()];
        loop {
            let intervals: Vec<(usize, usize)> =
                idx.iter().enumerate().map(|(j, &i)| splits[j][i]).collect();
            boxes.push(crate::simple::BoxRegion::new(intervals).expect("non-empty"));
            coeffs.push(rng.complex_normal());
            let mut j = splits.len();
            loop {
                if j == 0 {
                    break;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < splits[j].len() {
                    break;
                }
                idx[j] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    SimpleFunction::new(boxes, coeffs).expect("refinements stay disjoint")
}

/// Dense iid complex-normal samples.
pub fn grid_function(rng: &mut SplitMix64, grid: &TensorGrid) -> GridFunction {
    let shape = grid.shape();
    let n: usize = shape.iter().product();
    let values: Vec<Complex64> = (0..n).map(|_| rng.complex_normal()).collect();
    GridFunction::new(
        grid,
        ndarray::ArrayD::from_shape_vec(ndarray::IxDyn(&shape), values).expect("sized"),
    )
    .expect("finite samples")
}
