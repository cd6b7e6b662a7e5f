//! The Hermite eigen-system of `A = -Δ + |x|²` and functions of it.
//!
//! The eigenvalues are `λ_(k) = Σ_i (2 k_i + 1)` with orthonormal Hermite
//! eigenfunctions; a spectral function `F` acts by `F(A) φ_k = F(λ_k) φ_k`,
//! so `F(A)` has the factored kernel `Σ_j F(λ_j) φ_j(x) φ_j(y)` and the
//! trace `Σ_j F(λ_j)` when that series converges absolutely.
//!
//! Hermite values come from the normalized three-term recurrence, which
//! keeps every intermediate bounded (no factorials, no overflow) well past
//! index 200.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponents::ExponentTuple;
use crate::grid::{GridAxis, GridFunction, TensorGrid};
use crate::kahan::Kahan;
use crate::nuclear_ops::NuclearRep;
use crate::stft_gabor::{stft, tf_mixed_norm, TfPlan, Window};
use crate::weights::SeparableWeight;

/// Hard cap on the Hermite index; the recurrence is normalized, so this
/// guards quadrature cost rather than overflow.
pub const MAX_HERMITE_INDEX: usize = 1024;

/// Orthonormal Hermite function values `φ_0 … φ_kmax` at the given points.
pub fn hermite_table(kmax: usize, points: &[f64]) -> Result<Vec<Vec<f64>>> {
    if kmax > MAX_HERMITE_INDEX {
        return Err(Error::InvalidParameter(format!(
            "Hermite index {kmax} exceeds the supported bound {MAX_HERMITE_INDEX}"
        )));
    }
    let n = points.len();
    let norm0 = std::f64::consts::PI.powf(-0.25);
    let mut table = Vec::with_capacity(kmax + 1);
    let phi0: Vec<f64> = points.iter().map(|&x| norm0 * (-x * x / 2.0).exp()).collect();
    table.push(phi0);
    if kmax >= 1 {
        let phi1: Vec<f64> = points
            .iter()
            .zip(&table[0])
            .map(|(&x, &p0)| std::f64::consts::SQRT_2 * x * p0)
            .collect();
        table.push(phi1);
    }
    for k in 1..kmax {
        let a = (2.0 / (k as f64 + 1.0)).sqrt();
        let b = (k as f64 / (k as f64 + 1.0)).sqrt();
        let next: Vec<f64> = (0..n)
            .map(|i| a * points[i] * table[k][i] - b * table[k - 1][i])
            .collect();
        table.push(next);
    }
    Ok(table)
}

/// Values of a single `φ_k`.
pub fn hermite_eval(k: usize, points: &[f64]) -> Result<Vec<f64>> {
    Ok(hermite_table(k, points)?.pop().expect("table has k+1 rows"))
}

/// `λ_(k) = Σ_i (2 k_i + 1)`.
pub fn eigenvalue(k: &[usize]) -> f64 {
    k.iter().map(|&ki| 2 * ki + 1).sum::<usize>() as f64
}

/// The truncated eigen-system: per-axis indices `0..=kmax` in dimension
/// `d`, enumerated by nondecreasing eigenvalue with lexicographic
/// tie-break, sampled on a reference grid wide enough for the largest
/// classical turning point plus six units of Gaussian decay.
#[derive(Debug, Clone)]
pub struct HermiteSystem {
    d: usize,
    kmax: usize,
    grid: TensorGrid,
    tables: Vec<Vec<Vec<f64>>>,
    order: Vec<Vec<usize>>,
}

impl HermiteSystem {
    pub fn new(d: usize, kmax: usize) -> Result<Self> {
        let half = ((2 * kmax + 1) as f64).sqrt() + 6.0;
        let axis = GridAxis::uniform_nodes(-half, half, 1001)?;
        let grid = TensorGrid::new(vec![axis; d])?;
        Self::with_grid(d, kmax, grid)
    }

    pub fn with_grid(d: usize, kmax: usize, grid: TensorGrid) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if grid.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "system dimension {d} but grid has {} axes",
                grid.dim()
            )));
        }
        let tables = (0..d)
            .map(|j| hermite_table(kmax, grid.axis(j).points()))
            .collect::<Result<Vec<_>>>()?;
        let mut order: Vec<Vec<usize>> = Vec::with_capacity((kmax + 1).pow(d as u32));
        let mut idx = vec![0usize; d];
        loop {
            order.push(idx.clone());
            let mut j = d;
            loop {
                if j == 0 {
                    break;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] <= kmax {
                    break;
                }
                idx[j] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
        order.sort_by(|a, b| {
            let la = a.iter().sum::<usize>();
            let lb = b.iter().sum::<usize>();
            la.cmp(&lb).then_with(|| a.cmp(b))
        });
        Ok(Self {
            d,
            kmax,
            grid,
            tables,
            order,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn grid(&self) -> &TensorGrid {
        &self.grid
    }

    /// Multi-index of the `j`-th eigenpair in the enumeration.
    pub fn multi_index(&self, j: usize) -> &[usize] {
        &self.order[j]
    }

    pub fn eigenvalue_at(&self, j: usize) -> f64 {
        eigenvalue(&self.order[j])
    }

    /// Sampled `φ_(k)` for the `j`-th eigenpair (real-valued; stored as a
    /// complex grid function).
    pub fn eigenfunction(&self, j: usize) -> GridFunction {
        let k = &self.order[j];
        let shape = self.grid.shape();
        let values = ndarray::ArrayD::from_shape_fn(ndarray::IxDyn(&shape), |idx| {
            let mut v = 1.0;
            for axis in 0..self.d {
                v *= self.tables[axis][k[axis]][idx[axis]];
            }
            Complex64::new(v, 0.0)
        });
        GridFunction::new(&self.grid, values).expect("finite Hermite values")
    }
}

/// Spectral functions `F` applied to the oscillator.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralFunction {
    /// `F(λ) = λ^{-n}`, `n ≥ 1`.
    PowerNeg(u32),
    /// `F(λ) = e^{-tλ}`, `t > 0`.
    ExpNeg(f64),
    /// Lookup table of `(λ, F(λ))` pairs.
    Table(Vec<(f64, f64)>),
}

impl SpectralFunction {
    pub fn power_neg(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "negative power must have exponent at least 1".into(),
            ));
        }
        Ok(SpectralFunction::PowerNeg(n))
    }

    pub fn exp_neg(t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "heat parameter must be positive and finite, got {t}"
            )));
        }
        Ok(SpectralFunction::ExpNeg(t))
    }

    pub fn table(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Empty("spectral table has no entries".into()));
        }
        if pairs.iter().any(|(l, v)| !l.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidValues("spectral table entries must be finite".into()));
        }
        Ok(SpectralFunction::Table(pairs))
    }

    pub fn eval(&self, lambda: f64) -> Result<f64> {
        match self {
            SpectralFunction::PowerNeg(n) => Ok(lambda.powi(-(*n as i32))),
            SpectralFunction::ExpNeg(t) => Ok((-t * lambda).exp()),
            SpectralFunction::Table(pairs) => pairs
                .iter()
                .find(|(l, _)| (l - lambda).abs() <= 1e-9 * lambda.abs().max(1.0))
                .map(|&(_, v)| v)
                .ok_or_else(|| {
                    Error::UndefinedSpectralValue(format!(
                        "table has no entry for lambda = {lambda}"
                    ))
                }),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            SpectralFunction::PowerNeg(n) => format!("power:-{n}"),
            SpectralFunction::ExpNeg(t) => format!("exp:{t}"),
            SpectralFunction::Table(p) => format!("table:{}", p.len()),
        }
    }
}

/// The factored kernel of `F(A)` truncated to the first `n_ranks`
/// eigenpairs: pairs `(F(λ_j)·φ_j, φ_j)` (the eigenfunctions are real, so
/// no conjugate appears).
pub fn spectral_rep(
    f: &SpectralFunction,
    system: &HermiteSystem,
    n_ranks: usize,
) -> Result<NuclearRep> {
    if n_ranks > system.len() {
        return Err(Error::InvalidParameter(format!(
            "truncation {n_ranks} exceeds the system size {}",
            system.len()
        )));
    }
    let pairs = (0..n_ranks)
        .map(|j| {
            let phi = system.eigenfunction(j);
            let flam = f.eval(system.eigenvalue_at(j))?;
            Ok((phi.scale(Complex64::new(flam, 0.0)), phi))
        })
        .collect::<Result<Vec<_>>>()?;
    NuclearRep::hilbert(system.grid().clone(), pairs)
}

/// Spectral trace with a tail estimate.
#[derive(Debug, Clone, Copy)]
pub struct TraceFReport {
    /// Partial sum `Σ F(λ_k)` over `k ∈ {0..=kmax}^d` (multiplicities are
    /// automatic in the multi-index enumeration).
    pub value: f64,
    /// Analytic bound on the omitted tail, when the tagged form admits
    /// one (`None` for tables).
    pub tail_bound: Option<f64>,
    pub terms: usize,
}

fn odd_power_sum(a: f64, kmax: usize) -> f64 {
    let mut acc = Kahan::new();
    for k in 0..=kmax {
        acc.add(((2 * k + 1) as f64).powf(-a));
    }
    acc.value()
}

/// Midpoint-rule bound on `Σ_{k > kmax} (2k+1)^{-a}` for `a > 1`; the
/// summand is convex, so each term is dominated by the cell integral.
fn odd_power_tail(a: f64, kmax: usize) -> f64 {
    ((2 * kmax + 2) as f64).powf(1.0 - a) / (2.0 * (a - 1.0))
}

/// `Tr F(A)` in dimension `d` truncated at per-axis index `kmax`
/// (inclusive), with an analytic tail bound for the tagged forms.
pub fn trace_f(f: &SpectralFunction, d: usize, kmax: usize) -> Result<TraceFReport> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if kmax > MAX_HERMITE_INDEX {
        return Err(Error::InvalidParameter(format!(
            "truncation {kmax} exceeds the supported bound {MAX_HERMITE_INDEX}"
        )));
    }

    // Partial sum over the index box, nondecreasing λ first for a
    // deterministic, well-ordered accumulation.
    let mut lambdas: Vec<f64> = Vec::with_capacity((kmax + 1).pow(d as u32));
    let mut idx = vec![0usize; d];
    loop {
        lambdas.push(eigenvalue(&idx));
        let mut j = d;
        loop {
            if j == 0 {
                break;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] <= kmax {
                break;
            }
            idx[j] = 0;
        }
        if idx.iter().all(|&i| i == 0) {
            break;
        }
    }
    lambdas.sort_by(f64::total_cmp);
    let mut acc = Kahan::new();
    let mut terms_abs: Vec<f64> = Vec::with_capacity(lambdas.len());
    for &l in &lambdas {
        let v = f.eval(l)?;
        acc.add(v);
        terms_abs.push(v.abs());
    }
    let value = acc.value();

    let tail_bound = match f {
        SpectralFunction::ExpNeg(t) => {
            let full = (0.5 / t.sinh()).powi(d as i32);
            let partial1 = {
                let mut s = Kahan::new();
                for k in 0..=kmax {
                    s.add((-t * (2 * k + 1) as f64).exp());
                }
                s.value()
            };
            Some((full - partial1.powi(d as i32)).max(0.0))
        }
        SpectralFunction::PowerNeg(n) => {
            let nf = *n as f64;
            if nf <= d as f64 {
                return Err(Error::DivergentTail(format!(
                    "power -{n} is not summable over the dimension-{d} spectrum; \
                     the exponent must exceed the dimension"
                )));
            }
            if d == 1 {
                Some(odd_power_tail(nf, kmax))
            } else {
                // λ ≥ d·Π(2k_i+1)^{1/d} bounds the tail by a product of
                // one-dimensional sums with exponent a = n/d > 1.
                let a = nf / d as f64;
                let buffer = 200_000usize;
                let s_full = odd_power_sum(a, buffer) + odd_power_tail(a, buffer);
                let s_part = odd_power_sum(a, kmax);
                Some((s_full.powi(d as i32) - s_part.powi(d as i32)).max(0.0) / nf.powi(0)
                    * (d as f64).powf(-nf))
            }
        }
        SpectralFunction::Table(_) => {
            // No analytic form: refuse visibly divergent tails, report no
            // bound otherwise.
            let m = terms_abs.len().min(5);
            if m >= 2 {
                let tail = &terms_abs[terms_abs.len() - m..];
                let nondecreasing = tail.windows(2).all(|w| w[1] >= w[0]);
                if nondecreasing && *tail.last().unwrap() > 0.0 {
                    return Err(Error::DivergentTail(
                        "table values do not decay along the spectrum".into(),
                    ));
                }
            }
            None
        }
    };

    Ok(TraceFReport {
        value,
        tail_bound,
        terms: lambdas.len(),
    })
}

/// One row of the nuclearity-criterion table.
#[derive(Debug, Clone, Copy)]
pub struct NuclearityRow {
    pub j: usize,
    pub lambda: f64,
    /// `‖φ_j‖_{M_s^{p,q}}`.
    pub norm_primal: f64,
    /// `‖φ_j‖_{M_{-s}^{p',q'}}`.
    pub norm_dual: f64,
    /// `|F(λ_j)|^r · norm_primal^r · norm_dual^r`.
    pub term: f64,
    /// Running partial sum of the terms.
    pub partial: f64,
}

#[derive(Debug, Clone)]
pub struct NuclearityTable {
    pub rows: Vec<NuclearityRow>,
    /// Ratio of the last two terms; a flatness diagnostic for the decay.
    pub flatness: Option<f64>,
}

/// Partial sums of the nuclearity-criterion series
/// `Σ_j |F(λ_j)|^r ‖φ_j‖_{M_s^{p,q}}^r ‖φ_j‖_{M_{-s}^{p',q'}}^r`
/// for the modulation weight `(1+|ξ|)^s`, computed with the given window
/// on the given time-frequency plan (one spatial dimension).
#[allow(clippy::too_many_arguments)]
pub fn nuclearity_criterion(
    f: &SpectralFunction,
    r: f64,
    s: f64,
    p: f64,
    q: f64,
    system: &HermiteSystem,
    window: &Window,
    n_terms: usize,
    plan: &TfPlan,
) -> Result<NuclearityTable> {
    if system.dim() != 1 {
        return Err(Error::Unsupported(
            "modulation norms are implemented for one spatial dimension".into(),
        ));
    }
    if !(0.0..=1.0).contains(&r) || r == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "nuclearity order must lie in (0, 1], got {r}"
        )));
    }
    if !(1.0..f64::INFINITY).contains(&p) || !(1.0..f64::INFINITY).contains(&q) {
        return Err(Error::InvalidExponent(format!(
            "modulation exponents must lie in [1, inf), got p={p}, q={q}"
        )));
    }
    if n_terms > system.len() {
        return Err(Error::InvalidParameter(format!(
            "requested {n_terms} terms from a system of size {}",
            system.len()
        )));
    }
    let w_primal = SeparableWeight::modulation(1, s)?;
    let w_dual = SeparableWeight::modulation(1, -s)?;
    let tuple = ExponentTuple::new(&[p, q])?;
    let dual = tuple.dual();

    let x_axis = plan.x_axis()?;
    let xi_axis = plan.xi_axis()?;
    let entries: Vec<(f64, f64, f64, f64)> = (0..n_terms)
        .into_par_iter()
        .map(|j| -> Result<(f64, f64, f64, f64)> {
            let lambda = system.eigenvalue_at(j);
            let phi = system.eigenfunction(j);
            let tf = stft(&phi, system.grid(), window, &x_axis, &xi_axis)?;
            let norm_primal = tf_mixed_norm(&tf, tuple.exponent(0), tuple.exponent(1), &w_primal)?;
            let norm_dual = tf_mixed_norm(&tf, dual.exponent(0), dual.exponent(1), &w_dual)?;
            let flam = f.eval(lambda)?;
            let term = flam.abs().powf(r) * norm_primal.powf(r) * norm_dual.powf(r);
            Ok((lambda, norm_primal, norm_dual, term))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(n_terms);
    let mut acc = Kahan::new();
    for (j, &(lambda, norm_primal, norm_dual, term)) in entries.iter().enumerate() {
        acc.add(term);
        rows.push(NuclearityRow {
            j,
            lambda,
            norm_primal,
            norm_dual,
            term,
            partial: acc.value(),
        });
    }
    let flatness = (rows.len() >= 2 && rows[rows.len() - 2].term > 0.0)
        .then(|| rows[rows.len() - 1].term / rows[rows.len() - 2].term);
    Ok(NuclearityTable { rows, flatness })
}
