//! The explicit finite-rank operator of the metric-approximation argument.
//!
//! From a family of disjoint product boxes (a subfamily of a full tensor
//! family of per-axis disjoint intervals) and an elementary weight `γ_k`
//! per box, the operator is `L f = Σ_k ⟨f, u_k⟩ v_k` with
//!
//! `u_k = γ_k · 1_B / Π_j μ_j^{1/p_j'}`,   `v_k = γ_k^{-1} · 1_B / Π_j μ_j^{1/p_j}`.
//!
//! These are the unweighted factors conjugated by the isometry
//! `f ↦ f·w` between `L_w^P` and `L^P`, so `⟨v_k, u_k⟩ = 1` exactly:
//! `L` fixes every function subordinate to the partition, `L∘L = L`, and
//! `‖L‖ ≤ 1` in the weighted norm. With `γ ≡ 1` they reduce to the plain
//! normalized indicators.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponents::ExponentTuple;
use crate::grid::{GridFunction, TensorGrid};
use crate::kahan::{Kahan, KahanComplex};
use crate::mixed_norm::{mixed_norm, mixed_norm_simple};
use crate::rng::SplitMix64;
use crate::simple::{BoxRegion, SimpleFunction};
use crate::weights::{ElementaryWeight, Weight};

/// One selected box of the tensor family with its weight coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionBox {
    pub cell: Vec<usize>,
    pub gamma: f64,
}

/// Per-axis disjoint interval lists plus a selection of tensor cells, one
/// `γ_k > 0` per selected box (`γ ≡ 1` when no elementary weight is in
/// play).
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSpec {
    axis_intervals: Vec<Vec<(usize, usize)>>,
    boxes: Vec<PartitionBox>,
}

impl PartitionSpec {
    pub fn new(
        axis_intervals: Vec<Vec<(usize, usize)>>,
        boxes: Vec<PartitionBox>,
    ) -> Result<Self> {
        if axis_intervals.is_empty() {
            return Err(Error::InvalidPartition("partition needs at least one axis".into()));
        }
        for (j, intervals) in axis_intervals.iter().enumerate() {
            if intervals.is_empty() {
                return Err(Error::InvalidPartition(format!("axis {j} has no intervals")));
            }
            for &(lo, hi) in intervals {
                if lo >= hi {
                    return Err(Error::InvalidPartition(format!(
                        "axis {j} has the empty interval [{lo}, {hi})"
                    )));
                }
            }
            for a in 0..intervals.len() {
                for b in (a + 1)..intervals.len() {
                    let (lo1, hi1) = intervals[a];
                    let (lo2, hi2) = intervals[b];
                    if !(hi1 <= lo2 || hi2 <= lo1) {
                        return Err(Error::InvalidPartition(format!(
                            "axis {j} intervals {a} and {b} overlap"
                        )));
                    }
                }
            }
        }
        let n = axis_intervals.len();
        let mut seen = std::collections::BTreeSet::new();
        for (i, b) in boxes.iter().enumerate() {
            if b.cell.len() != n {
                return Err(Error::InvalidPartition(format!(
                    "box {i} has {} coordinates on {n} axes",
                    b.cell.len()
                )));
            }
            for (j, &c) in b.cell.iter().enumerate() {
                if c >= axis_intervals[j].len() {
                    return Err(Error::InvalidPartition(format!(
                        "box {i} selects interval {c} on axis {j}, which has only {}",
                        axis_intervals[j].len()
                    )));
                }
            }
            if !b.gamma.is_finite() || b.gamma <= 0.0 {
                return Err(Error::InvalidPartition(format!(
                    "box {i} has non-positive weight coefficient {}",
                    b.gamma
                )));
            }
            if !seen.insert(b.cell.clone()) {
                return Err(Error::InvalidPartition(format!("box {i} repeats a cell")));
            }
        }
        Ok(Self {
            axis_intervals,
            boxes,
        })
    }

    /// Every cell of the tensor family, row-major, with optional weights.
    pub fn full_tensor(
        axis_intervals: Vec<Vec<(usize, usize)>>,
        gammas: Option<Vec<f64>>,
    ) -> Result<Self> {
        let counts: Vec<usize> = axis_intervals.iter().map(Vec::len).collect();
        let total: usize = counts.iter().product();
        let gammas = match gammas {
            None => vec![1.0; total],
            Some(g) => {
                if g.len() != total {
                    return Err(Error::InvalidPartition(format!(
                        "expected {total} weight coefficients, got {}",
                        g.len()
                    )));
                }
                g
            }
        };
        let mut boxes = Vec::with_capacity(total);
        let mut cell = vec![0usize; counts.len()];
        for gamma in gammas {
            boxes.push(PartitionBox {
                cell: cell.clone(),
                gamma,
            });
            for j in (0..cell.len()).rev() {
                cell[j] += 1;
                if cell[j] < counts[j] {
                    break;
                }
                cell[j] = 0;
            }
        }
        Self::new(axis_intervals, boxes)
    }

    /// Diagonal selection: interval lists of a common length `l`, box `i`
    /// picking interval `i` on every axis.
    pub fn diagonal(
        axis_intervals: Vec<Vec<(usize, usize)>>,
        gammas: Option<Vec<f64>>,
    ) -> Result<Self> {
        let l = axis_intervals.first().map_or(0, Vec::len);
        if axis_intervals.iter().any(|iv| iv.len() != l) {
            return Err(Error::InvalidPartition(
                "diagonal selection needs interval lists of equal length".into(),
            ));
        }
        let gammas = match gammas {
            None => vec![1.0; l],
            Some(g) => {
                if g.len() != l {
                    return Err(Error::InvalidPartition(format!(
                        "expected {l} weight coefficients, got {}",
                        g.len()
                    )));
                }
                g
            }
        };
        let boxes = gammas
            .into_iter()
            .enumerate()
            .map(|(i, gamma)| PartitionBox {
                cell: vec![i; axis_intervals.len()],
                gamma,
            })
            .collect();
        Self::new(axis_intervals, boxes)
    }

    pub fn dim(&self) -> usize {
        self.axis_intervals.len()
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn axis_intervals(&self) -> &[Vec<(usize, usize)>] {
        &self.axis_intervals
    }

    pub fn boxes(&self) -> &[PartitionBox] {
        &self.boxes
    }

    pub fn region(&self, i: usize) -> BoxRegion {
        let intervals = self.boxes[i]
            .cell
            .iter()
            .enumerate()
            .map(|(j, &c)| self.axis_intervals[j][c])
            .collect();
        BoxRegion::new(intervals).expect("validated at construction")
    }

    pub fn regions(&self) -> Vec<BoxRegion> {
        (0..self.len()).map(|i| self.region(i)).collect()
    }

    pub fn is_weighted(&self) -> bool {
        self.boxes.iter().any(|b| b.gamma != 1.0)
    }

    /// The norm weight this partition carries: the constant weight for the
    /// unweighted case, otherwise the elementary weight `Σ γ_k 1_{B_k}`.
    pub fn weight(&self) -> Result<Weight> {
        if !self.is_weighted() {
            return Ok(Weight::one(self.dim()));
        }
        let gammas = self.boxes.iter().map(|b| b.gamma).collect();
        Ok(Weight::Elementary(ElementaryWeight::new(
            self.regions(),
            gammas,
        )?))
    }

    pub fn check_on_grid(&self, grid: &TensorGrid) -> Result<()> {
        if grid.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "partition has {} axes on a {}-axis grid",
                self.dim(),
                grid.dim()
            )));
        }
        for (j, intervals) in self.axis_intervals.iter().enumerate() {
            for &(_, hi) in intervals {
                if hi > grid.axis(j).len() {
                    return Err(Error::InvalidPartition(format!(
                        "axis {j} interval ends at {hi} but the axis has {} cells",
                        grid.axis(j).len()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One rank-one term `v_k ⊗ u_k` of the operator: `u_k` is the functional
/// factor, `v_k` the range factor.
#[derive(Debug, Clone)]
pub struct RankOneFactorPair {
    pub index: usize,
    pub region: BoxRegion,
    pub functional: SimpleFunction,
    pub range: SimpleFunction,
    u_coeff: f64,
    v_coeff: f64,
}

impl RankOneFactorPair {
    pub fn u_coeff(&self) -> f64 {
        self.u_coeff
    }

    pub fn v_coeff(&self) -> f64 {
        self.v_coeff
    }
}

/// Build the factor pairs for a partition and a finite exponent tuple.
pub fn build_factors(
    part: &PartitionSpec,
    p: &ExponentTuple,
    grid: &TensorGrid,
) -> Result<Vec<RankOneFactorPair>> {
    if !p.is_finite() {
        return Err(Error::InvalidExponent(
            "the operator is built for finite (primal) exponent tuples".into(),
        ));
    }
    part.check_on_grid(grid)?;
    if p.len() != grid.dim() {
        return Err(Error::DimensionMismatch(format!(
            "exponent tuple of length {} on a {}-axis grid",
            p.len(),
            grid.dim()
        )));
    }
    let dual = p.dual();
    let mut out = Vec::with_capacity(part.len());
    for (i, b) in part.boxes().iter().enumerate() {
        let region = part.region(i);
        let mut mu_p = 1.0; // Π μ_j^{1/p_j}
        let mut mu_pd = 1.0; // Π μ_j^{1/p_j'}
        for j in 0..grid.dim() {
            let mu = region.axis_measure(grid, j);
            if !(mu > 0.0) || !mu.is_finite() {
                return Err(Error::InvalidPartition(format!(
                    "box {i} has non-positive measure on axis {j}"
                )));
            }
            mu_p *= mu.powf(p.exponent(j).reciprocal());
            mu_pd *= mu.powf(dual.exponent(j).reciprocal());
        }
        let u_coeff = b.gamma / mu_pd;
        let v_coeff = 1.0 / (b.gamma * mu_p);
        let functional = SimpleFunction::new(
            vec![region.clone()],
            vec![Complex64::new(u_coeff, 0.0)],
        )?;
        let range = SimpleFunction::new(
            vec![region.clone()],
            vec![Complex64::new(v_coeff, 0.0)],
        )?;
        out.push(RankOneFactorPair {
            index: i,
            region,
            functional,
            range,
            u_coeff,
            v_coeff,
        });
    }
    Ok(out)
}

fn pair_with_indicator(f: &GridFunction, region: &BoxRegion, grid: &TensorGrid) -> Complex64 {
    let mut acc = KahanComplex::new();
    region.for_each_cell(|idx| {
        acc.add(f.values()[ndarray::IxDyn(idx)] * grid.cell_measure(idx));
    });
    acc.value()
}

fn pair_with_indicator_simple(
    f: &SimpleFunction,
    region: &BoxRegion,
    grid: &TensorGrid,
) -> Complex64 {
    let mut acc = KahanComplex::new();
    for (b, &c) in f.boxes().iter().zip(f.coeffs()) {
        if let Some(cap) = b.intersect(region) {
            acc.add(c * cap.measure(grid));
        }
    }
    acc.value()
}

/// `L f = Σ_k ⟨f, u_k⟩ v_k` for a sampled function.
pub fn apply_to_grid(
    factors: &[RankOneFactorPair],
    f: &GridFunction,
    grid: &TensorGrid,
) -> Result<GridFunction> {
    if f.values().shape() != grid.shape().as_slice() {
        return Err(Error::DimensionMismatch(
            "function does not match the operator grid".into(),
        ));
    }
    let mut out = GridFunction::zeros(grid);
    for fac in factors {
        let coeff = pair_with_indicator(f, &fac.region, grid) * fac.u_coeff * fac.v_coeff;
        fac.region.for_each_cell(|idx| {
            out.values_mut()[ndarray::IxDyn(idx)] = coeff;
        });
    }
    Ok(out)
}

/// `L f` for a simple function; pairings are evaluated exactly through
/// box-intersection measures.
pub fn apply_to_simple(
    factors: &[RankOneFactorPair],
    f: &SimpleFunction,
    grid: &TensorGrid,
) -> Result<SimpleFunction> {
    for b in f.boxes() {
        b.check_on_grid(grid)?;
    }
    let mut boxes = Vec::with_capacity(factors.len());
    let mut coeffs = Vec::with_capacity(factors.len());
    for fac in factors {
        let coeff =
            pair_with_indicator_simple(f, &fac.region, grid) * fac.u_coeff * fac.v_coeff;
        boxes.push(fac.region.clone());
        coeffs.push(coeff);
    }
    SimpleFunction::new(boxes, coeffs)
}

/// Row norms of the two factor families against a primal/dual pair:
/// `(‖⟨f, u_k⟩‖_{ℓ^{p_n}}, ‖⟨v_k, g⟩‖_{ℓ^{p_n'}})`.
pub fn ell_pn_row_norms(
    factors: &[RankOneFactorPair],
    f: &GridFunction,
    g: &GridFunction,
    p: &ExponentTuple,
    grid: &TensorGrid,
) -> Result<(f64, f64)> {
    let pn = p.last().finite_value().ok_or_else(|| {
        Error::InvalidExponent("row norms need a finite outermost exponent".into())
    })?;
    let mut acc = Kahan::new();
    for fac in factors {
        let v = pair_with_indicator(f, &fac.region, grid).norm() * fac.u_coeff;
        acc.add(v.powf(pn));
    }
    let first = acc.value().powf(1.0 / pn);

    let second = match p.dual().last() {
        crate::exponents::Exponent::Finite(pnd) => {
            let mut acc = Kahan::new();
            for fac in factors {
                let v = pair_with_indicator(g, &fac.region, grid).norm() * fac.v_coeff;
                acc.add(v.powf(pnd));
            }
            acc.value().powf(1.0 / pnd)
        }
        crate::exponents::Exponent::Infinite => factors
            .iter()
            .map(|fac| pair_with_indicator(g, &fac.region, grid).norm() * fac.v_coeff)
            .fold(0.0, f64::max),
    };
    Ok((first, second))
}

/// The function a certificate trial draws, kept so the worst case can be
/// reported.
#[derive(Debug, Clone)]
pub enum TrialInput {
    Grid(GridFunction),
    Simple(SimpleFunction),
}

/// Outcome of a randomized contraction certificate.
#[derive(Debug, Clone)]
pub struct ContractionReport {
    /// `max ‖Lf‖/‖f‖` over the trials (0 when every trial degenerated).
    pub max_ratio: f64,
    /// Trial index attaining the maximum.
    pub argmax_trial: u64,
    /// The attaining input, regenerated from its trial stream.
    pub argmax_input: Option<TrialInput>,
    /// Trials skipped for having numerically zero norm.
    pub skipped: u64,
}

fn trial_input(
    part: &PartitionSpec,
    grid: &TensorGrid,
    seed: u64,
    trial: u64,
) -> TrialInput {
    let mut rng = SplitMix64::stream(seed, trial);
    match trial % 3 {
        0 => TrialInput::Grid(crate::random::grid_function(&mut rng, grid)),
        1 => TrialInput::Simple(crate::random::refined_simple(&mut rng, part)),
        _ => TrialInput::Simple(crate::random::subordinate_simple(&mut rng, part)),
    }
}

/// Randomized operator-norm certificate: the maximum of `‖Lf‖/‖f‖` over
/// seeded random grid functions, refined simple functions and subordinate
/// simple functions. Degenerate draws (vanishing norm) are skipped.
pub fn contraction_certificate(
    part: &PartitionSpec,
    p: &ExponentTuple,
    w: &Weight,
    grid: &TensorGrid,
    trials: u64,
    seed: u64,
) -> Result<ContractionReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("certificate needs trials >= 1".into()));
    }
    let factors = build_factors(part, p, grid)?;
    let ratios: Vec<Option<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let input = trial_input(part, grid, seed, t);
            let (nf, nlf) = match &input {
                TrialInput::Grid(f) => {
                    let nf = mixed_norm(f, p, w, grid).expect("validated inputs");
                    if nf < 1e-12 {
                        return None;
                    }
                    let lf = apply_to_grid(&factors, f, grid).expect("validated inputs");
                    (nf, mixed_norm(&lf, p, w, grid).expect("validated inputs"))
                }
                TrialInput::Simple(f) => {
                    let nf = mixed_norm_simple(f, p, w, grid).expect("validated inputs");
                    if nf < 1e-12 {
                        return None;
                    }
                    let lf = apply_to_simple(&factors, f, grid).expect("validated inputs");
                    (nf, mixed_norm_simple(&lf, p, w, grid).expect("validated inputs"))
                }
            };
            Some(nlf / nf)
        })
        .collect();

    let mut max_ratio = 0.0f64;
    let mut argmax_trial = 0u64;
    let mut skipped = 0u64;
    let mut any = false;
    for (t, r) in ratios.iter().enumerate() {
        match r {
            Some(ratio) => {
                if !any || *ratio > max_ratio {
                    max_ratio = *ratio;
                    argmax_trial = t as u64;
                    any = true;
                }
            }
            None => skipped += 1,
        }
    }
    let argmax_input = any.then(|| trial_input(part, grid, seed, argmax_trial));
    Ok(ContractionReport {
        max_ratio: if any { max_ratio } else { 0.0 },
        argmax_trial,
        argmax_input,
        skipped,
    })
}

/// `‖L f⁰ - f⁰‖_{L_w^P}` for a seeded random subordinate simple function of
/// unit norm; the projection identity makes this vanish to rounding.
pub fn projection_residual(
    part: &PartitionSpec,
    p: &ExponentTuple,
    w: &Weight,
    grid: &TensorGrid,
    seed: u64,
) -> Result<f64> {
    if part.is_empty() {
        return Ok(0.0);
    }
    let factors = build_factors(part, p, grid)?;
    let mut rng = SplitMix64::stream(seed, u64::MAX);
    let f0 = crate::random::subordinate_simple(&mut rng, part);
    let nf = mixed_norm_simple(&f0, p, w, grid)?;
    if nf == 0.0 {
        return Ok(0.0);
    }
    let f0 = f0.scale(Complex64::new(1.0 / nf, 0.0));
    let lf0 = apply_to_simple(&factors, &f0, grid)?;
    // Same boxes in the same order: subtract coefficients directly.
    let diff_coeffs: Vec<Complex64> = lf0
        .coeffs()
        .iter()
        .zip(f0.coeffs())
        .map(|(a, b)| a - b)
        .collect();
    let diff = SimpleFunction::new(lf0.boxes().to_vec(), diff_coeffs)?;
    mixed_norm_simple(&diff, p, w, grid)
}
