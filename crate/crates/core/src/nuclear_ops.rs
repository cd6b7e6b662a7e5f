//! Kernel operators from factored representations.
//!
//! A representation is a finite list of factor pairs `(g_n, h_n)` on a
//! shared grid, standing for the operator
//!
//! `T f(x) = ∫ ( Σ_n g_n(x) h_n(y) ) f(y) dμ(y) = Σ_n ⟨f, h_n⟩ g_n(x)`.
//!
//! Pairings are bilinear (no conjugation) throughout, matching the trace
//! functional `Tr T = Σ_n ⟨g_n, h_n⟩`. The Nyström discretization turns
//! the kernel into a matrix whose eigenvalues approximate the operator
//! spectrum; the infimum over representations behind the nuclear
//! quasi-norm is never searched — the factor-norm sum is reported as an
//! upper bound, which on Hilbert space meets the Schatten quasi-norm.

use nalgebra::DMatrix;
use ndarray::Dimension;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exponents::ExponentTuple;
use crate::grid::{GridFunction, TensorGrid};
use crate::kahan::{Kahan, KahanComplex};
use crate::mixed_norm::mixed_norm;
use crate::weights::Weight;

/// Maximum matrix side for dense spectral computations.
pub const MAX_DENSE_SIZE: usize = 4096;

/// A normed space declaration: exponents plus weight.
#[derive(Debug, Clone)]
pub struct SpaceSpec {
    pub exponents: ExponentTuple,
    pub weight: Weight,
}

impl SpaceSpec {
    /// Unweighted `L^2` on `n` axes.
    pub fn l2(n: usize) -> Self {
        Self {
            exponents: ExponentTuple::constant(2.0, n).expect("2 is a valid exponent"),
            weight: Weight::one(n),
        }
    }
}

/// Factored kernel representation `k(x,y) = Σ_n g_n(x) h_n(y)`.
#[derive(Debug, Clone)]
pub struct NuclearRep {
    grid: TensorGrid,
    pairs: Vec<(GridFunction, GridFunction)>,
    out_space: SpaceSpec,
    in_dual_space: SpaceSpec,
    r: f64,
    factor_norms: Vec<(f64, f64)>,
}

impl NuclearRep {
    /// `g_n` are measured in `out_space`, `h_n` in `in_dual_space`
    /// (the dual of the input space). `r ∈ (0, 1]` is the declared
    /// nuclearity order.
    pub fn new(
        grid: TensorGrid,
        pairs: Vec<(GridFunction, GridFunction)>,
        out_space: SpaceSpec,
        in_dual_space: SpaceSpec,
        r: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) || r == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "nuclearity order must lie in (0, 1], got {r}"
            )));
        }
        let shape = grid.shape();
        for (i, (g, h)) in pairs.iter().enumerate() {
            if g.values().shape() != shape.as_slice() || h.values().shape() != shape.as_slice() {
                return Err(Error::DimensionMismatch(format!(
                    "factor pair {i} does not match the grid"
                )));
            }
        }
        let factor_norms = pairs
            .iter()
            .map(|(g, h)| {
                let ng = mixed_norm(g, &out_space.exponents, &out_space.weight, &grid)?;
                let nh = mixed_norm(h, &in_dual_space.exponents, &in_dual_space.weight, &grid)?;
                Ok((ng, nh))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid,
            pairs,
            out_space,
            in_dual_space,
            r,
            factor_norms,
        })
    }

    /// Hilbert-space representation: both spaces unweighted `L^2`, `r = 1`.
    pub fn hilbert(grid: TensorGrid, pairs: Vec<(GridFunction, GridFunction)>) -> Result<Self> {
        let n = grid.dim();
        Self::new(grid, pairs, SpaceSpec::l2(n), SpaceSpec::l2(n), 1.0)
    }

    pub fn grid(&self) -> &TensorGrid {
        &self.grid
    }

    pub fn pairs(&self) -> &[(GridFunction, GridFunction)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn factor_norms(&self) -> &[(f64, f64)] {
        &self.factor_norms
    }

    /// Concatenation of two representations on the same grid (the kernel
    /// sum).
    pub fn concat(&self, other: &NuclearRep) -> Result<NuclearRep> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch(
                "cannot concatenate representations on different grids".into(),
            ));
        }
        let mut pairs = self.pairs.clone();
        pairs.extend(other.pairs.iter().cloned());
        NuclearRep::new(
            self.grid.clone(),
            pairs,
            self.out_space.clone(),
            self.in_dual_space.clone(),
            self.r,
        )
    }
}

/// Kernel matrix `k_N(x_i, y_j)` over flattened grid cells, with the `L¹`
/// increment `‖k_j - k_{j-1}‖_1 = ‖g_j‖_1 ‖h_j‖_1` per added rank.
#[derive(Debug, Clone)]
pub struct AssembledKernel {
    pub matrix: DMatrix<Complex64>,
    pub increments: Vec<f64>,
}

/// Truncated kernel `k_N(x,y) = Σ_{j<n} g_j(x) h_j(y)`.
pub fn assemble_kernel(rep: &NuclearRep, n: usize) -> Result<AssembledKernel> {
    if n > rep.len() {
        return Err(Error::InvalidParameter(format!(
            "truncation {n} exceeds the representation length {}",
            rep.len()
        )));
    }
    let size = rep.grid().n_cells();
    let mut matrix = DMatrix::<Complex64>::zeros(size, size);
    let mut increments = Vec::with_capacity(n);
    for (g, h) in rep.pairs().iter().take(n) {
        let gv: Vec<Complex64> = g.values().iter().cloned().collect();
        let hv: Vec<Complex64> = h.values().iter().cloned().collect();
        for (i, &gi) in gv.iter().enumerate() {
            for (j, &hj) in hv.iter().enumerate() {
                matrix[(i, j)] += gi * hj;
            }
        }
        increments.push(g.l1_norm(rep.grid()) * h.l1_norm(rep.grid()));
    }
    Ok(AssembledKernel { matrix, increments })
}

/// `T f = Σ_n ⟨f, h_n⟩ g_n` through the factored form.
pub fn apply_operator(rep: &NuclearRep, f: &GridFunction) -> Result<GridFunction> {
    let grid = rep.grid();
    if f.values().shape() != grid.shape().as_slice() {
        return Err(Error::DimensionMismatch(
            "function does not match the representation grid".into(),
        ));
    }
    let mut out = GridFunction::zeros(grid);
    for (g, h) in rep.pairs() {
        let mut acc = KahanComplex::new();
        for ((idx, &fv), &hv) in f.values().indexed_iter().zip(h.values().iter()) {
            acc.add(fv * hv * grid.cell_measure(idx.slice()));
        }
        let coeff = acc.value();
        out.values_mut()
            .iter_mut()
            .zip(g.values().iter())
            .for_each(|(o, &gv)| *o += coeff * gv);
    }
    Ok(out)
}

/// `T f` through the assembled kernel and quadrature (the second route of
/// the two-path agreement check).
pub fn apply_assembled(
    kernel: &AssembledKernel,
    f: &GridFunction,
    grid: &TensorGrid,
) -> Result<GridFunction> {
    let size = grid.n_cells();
    if kernel.matrix.nrows() != size || f.values().len() != size {
        return Err(Error::DimensionMismatch(
            "kernel, function and grid sizes disagree".into(),
        ));
    }
    let measures = flat_measures(grid);
    let fv: Vec<Complex64> = f.values().iter().cloned().collect();
    let mut out_vals = Vec::with_capacity(size);
    for i in 0..size {
        let mut acc = KahanComplex::new();
        for j in 0..size {
            acc.add(kernel.matrix[(i, j)] * fv[j] * measures[j]);
        }
        out_vals.push(acc.value());
    }
    GridFunction::new(
        grid,
        ndarray::ArrayD::from_shape_vec(ndarray::IxDyn(&grid.shape()), out_vals)
            .expect("sized above"),
    )
}

/// Representation upper bound `( Σ_n ‖g_n‖^r ‖h_n‖^r )^{1/r}` on the
/// r-nuclear quasi-norm, in the declared spaces.
pub fn nuclear_bound(rep: &NuclearRep, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) || r == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "nuclearity order must lie in (0, 1], got {r}"
        )));
    }
    let mut acc = Kahan::new();
    for &(ng, nh) in rep.factor_norms() {
        acc.add((ng * nh).powf(r));
    }
    Ok(acc.value().powf(1.0 / r))
}

/// The two trace routes: the pairing sum `Σ ⟨g_n, h_n⟩` and the kernel
/// diagonal `∫ k(x,x) dμ`.
#[derive(Debug, Clone, Copy)]
pub struct TraceReport {
    pub trace: Complex64,
    pub kernel_diagonal: Complex64,
    pub discrepancy: f64,
}

/// Nuclear trace of the representation. The two routes must agree within
/// `1e-8` (absolute, relative to `max(1, |trace|)`), otherwise the check
/// fails.
pub fn trace_from_rep(rep: &NuclearRep) -> Result<TraceReport> {
    let grid = rep.grid();
    let mut pairing = KahanComplex::new();
    for (g, h) in rep.pairs() {
        let mut acc = KahanComplex::new();
        for ((idx, &gv), &hv) in g.values().indexed_iter().zip(h.values().iter()) {
            acc.add(gv * hv * grid.cell_measure(idx.slice()));
        }
        pairing.add(acc.value());
    }
    let trace = pairing.value();

    let mut diag = KahanComplex::new();
    let mut cell = 0usize;
    let shape = grid.shape();
    let mut idx = vec![0usize; shape.len()];
    while cell < grid.n_cells() {
        let mut kxx = KahanComplex::new();
        for (g, h) in rep.pairs() {
            let gv = g.values().as_slice().expect("standard layout")[cell];
            let hv = h.values().as_slice().expect("standard layout")[cell];
            kxx.add(gv * hv);
        }
        diag.add(kxx.value() * grid.cell_measure(&idx));
        cell += 1;
        for j in (0..shape.len()).rev() {
            idx[j] += 1;
            if idx[j] < shape[j] {
                break;
            }
            idx[j] = 0;
        }
    }
    let kernel_diagonal = diag.value();

    let discrepancy = (trace - kernel_diagonal).norm();
    if discrepancy > 1e-8 * trace.norm().max(1.0) {
        return Err(Error::NumericalCheck(format!(
            "trace routes disagree: pairing {trace}, diagonal {kernel_diagonal}"
        )));
    }
    Ok(TraceReport {
        trace,
        kernel_diagonal,
        discrepancy,
    })
}

fn flat_measures(grid: &TensorGrid) -> Vec<f64> {
    let shape = grid.shape();
    let mut out = Vec::with_capacity(grid.n_cells());
    let mut idx = vec![0usize; shape.len()];
    for _ in 0..grid.n_cells() {
        out.push(grid.cell_measure(&idx));
        for j in (0..shape.len()).rev() {
            idx[j] += 1;
            if idx[j] < shape[j] {
                break;
            }
            idx[j] = 0;
        }
    }
    out
}

/// How quadrature weights enter the Nyström matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NystromMode {
    /// `M_ij = k(x_i, x_j) m_j`.
    ColumnWeights,
    /// `M_ij = √m_i k(x_i, x_j) √m_j`; keeps symmetric kernels symmetric
    /// and is spectrally equivalent to the column form.
    Symmetric,
}

/// Dense matrix discretization of an integral operator.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    matrix: DMatrix<Complex64>,
    mode: NystromMode,
}

impl DiscretizedOperator {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(
                "discretized operator must be square".into(),
            ));
        }
        Ok(Self {
            matrix,
            mode: NystromMode::ColumnWeights,
        })
    }

    pub fn from_real(matrix: DMatrix<f64>) -> Result<Self> {
        Self::from_matrix(matrix.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn mode(&self) -> NystromMode {
        self.mode
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Nyström discretization of the full representation.
pub fn discretize(rep: &NuclearRep, mode: NystromMode) -> Result<DiscretizedOperator> {
    let kernel = assemble_kernel(rep, rep.len())?;
    let measures = flat_measures(rep.grid());
    let size = measures.len();
    let mut matrix = kernel.matrix;
    match mode {
        NystromMode::ColumnWeights => {
            for j in 0..size {
                for i in 0..size {
                    matrix[(i, j)] *= measures[j];
                }
            }
        }
        NystromMode::Symmetric => {
            let roots: Vec<f64> = measures.iter().map(|m| m.sqrt()).collect();
            for j in 0..size {
                for i in 0..size {
                    // One symmetric product per (i, j); the matrix stays
                    // exactly symmetric when the kernel is.
                    matrix[(i, j)] *= roots[i] * roots[j];
                }
            }
        }
    }
    Ok(DiscretizedOperator { matrix, mode })
}

fn is_real(m: &DMatrix<Complex64>) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

fn sort_descending(mut eigs: Vec<Complex64>) -> Vec<Complex64> {
    eigs.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(b.re.total_cmp(&a.re))
            .then(b.im.total_cmp(&a.im))
    });
    eigs
}

/// Eigenvalues in descending modulus (ties: descending real part, then
/// imaginary part). Real matrices go through a real Schur or symmetric
/// reduction; complex matrices are supported when Hermitian.
pub fn spectrum(op: &DiscretizedOperator) -> Result<Vec<Complex64>> {
    let n = op.size();
    if n > MAX_DENSE_SIZE {
        return Err(Error::InvalidParameter(format!(
            "matrix side {n} exceeds the dense limit {MAX_DENSE_SIZE}"
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = &op.matrix;
    if is_real(m) {
        let real = m.map(|z| z.re);
        if real == real.transpose() {
            let eigs = real.symmetric_eigenvalues();
            return Ok(sort_descending(
                eigs.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            ));
        }
        let schur = nalgebra::linalg::Schur::try_new(real, f64::EPSILON, 100_000)
            .ok_or_else(|| {
                Error::NonConvergence("real Schur iteration stalled".into())
            })?;
        let eigs = schur.complex_eigenvalues();
        return Ok(sort_descending(
            eigs.iter().map(|z| Complex64::new(z.re, z.im)).collect(),
        ));
    }
    if m == &m.adjoint() {
        let eigs = m.map(|z| nalgebra::Complex::new(z.re, z.im)).symmetric_eigenvalues();
        return Ok(sort_descending(
            eigs.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        ));
    }
    Err(Error::Unsupported(
        "dense spectra are implemented for real and Hermitian matrices".into(),
    ))
}

/// Schatten quasi-norm `( Σ σ_i^r )^{1/r}` over the singular values, with
/// a numerical-rank cutoff at `σ_max · 1e-12`.
pub fn schatten_quasinorm(op: &DiscretizedOperator, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) || r == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Schatten order must lie in (0, 1], got {r}"
        )));
    }
    let n = op.size();
    if n > MAX_DENSE_SIZE {
        return Err(Error::InvalidParameter(format!(
            "matrix side {n} exceeds the dense limit {MAX_DENSE_SIZE}"
        )));
    }
    let m = op.matrix.map(|z| nalgebra::Complex::new(z.re, z.im));
    let svd = m
        .try_svd(false, false, f64::EPSILON, 1_000_000)
        .ok_or_else(|| Error::NonConvergence("SVD iteration stalled".into()))?;
    let sigma = svd.singular_values;
    let cutoff = sigma.iter().cloned().fold(0.0f64, f64::max) * 1e-12;
    let mut acc = Kahan::new();
    for &s in sigma.iter() {
        if s > cutoff {
            acc.add(s.powf(r));
        }
    }
    Ok(acc.value().powf(1.0 / r))
}

/// Comparison of the representation trace against the eigenvalue sum of
/// the discretized operator.
#[derive(Debug, Clone, Copy)]
pub struct LidskiiReport {
    pub trace: Complex64,
    pub eigensum: Complex64,
    pub rel_error: f64,
    /// The representation's declared nuclearity order; the classical
    /// trace-formula hypothesis asks for `r ≤ 2/3`, which is recorded,
    /// not enforced.
    pub r: f64,
    pub r_within_lidskii_hypothesis: bool,
}

/// Trace vs. eigenvalue-sum comparison for the discretized kernel.
pub fn lidskii_check(rep: &NuclearRep, mode: NystromMode) -> Result<LidskiiReport> {
    let trace = trace_from_rep(rep)?.trace;
    let op = discretize(rep, mode)?;
    let eigs = spectrum(&op)?;
    let mut acc = KahanComplex::new();
    for &e in &eigs {
        acc.add(e);
    }
    let eigensum = acc.value();
    let rel_error = (trace - eigensum).norm() / trace.norm().max(f64::MIN_POSITIVE);
    Ok(LidskiiReport {
        trace,
        eigensum,
        rel_error,
        r: rep.r(),
        r_within_lidskii_hypothesis: rep.r() <= 2.0 / 3.0,
    })
}
