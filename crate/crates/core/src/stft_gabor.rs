//! Short-time Fourier transform, modulation and Wiener-amalgam norms, and
//! Gabor-lattice coefficients (one spatial dimension).
//!
//! The transform follows the convention
//!
//! `V_g f(x, ξ) = ∫ f(y) conj(g(y - x)) e^{-i y ξ} dy`
//!
//! with no `2π` in the exponent; the constant `(2π)^d` then shows up only
//! in the Moyal identity `‖V_g f‖_2^2 = (2π)^d ‖f‖_2^2 ‖g‖_2^2`. The plain
//! transform `f̂(ξ) = ∫ f(y) e^{-iyξ} dy` reproduces
//! `|V_g f(x,ξ)| = (2π)^{-d} |V_ĝ f̂(ξ, -x)|` exactly, which fixes the
//! Fourier normalization used for the Wiener-amalgam norm.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponents::{Exponent, ExponentTuple};
use crate::grid::{GridAxis, GridFunction, TensorGrid};
use crate::mixed_norm::mixed_norm;
use crate::weights::{SeparableWeight, Weight};

const GAUSS_NORM: f64 = 0.751_125_544_464_942_9; // π^{-1/4}

/// Analytic form of a window, when there is one. Analytic evaluation wins
/// over interpolation for off-grid translates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowShape {
    /// `π^{-1/4} e^{-y²/2}`, unit `L²` norm.
    GaussianUnit,
    /// The unit Gaussian times a real amplitude.
    GaussianScaled(f64),
    /// No analytic form; translates are linearly interpolated.
    Custom,
}

/// Normalization tag carried by a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowNormalization {
    UnitL2,
    Raw,
}

/// A window function on a one-axis grid.
#[derive(Debug, Clone)]
pub struct Window {
    grid: TensorGrid,
    values: GridFunction,
    shape: WindowShape,
    normalization: WindowNormalization,
}

impl Window {
    /// The unit Gaussian sampled on `grid`.
    pub fn gaussian(grid: TensorGrid) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::Unsupported("windows are one-dimensional".into()));
        }
        let values = GridFunction::from_real_1d(&grid, |y| GAUSS_NORM * (-y * y / 2.0).exp())?;
        Ok(Self {
            grid,
            values,
            shape: WindowShape::GaussianUnit,
            normalization: WindowNormalization::UnitL2,
        })
    }

    fn gaussian_scaled(grid: TensorGrid, amplitude: f64) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::Unsupported("windows are one-dimensional".into()));
        }
        let values =
            GridFunction::from_real_1d(&grid, |y| amplitude * GAUSS_NORM * (-y * y / 2.0).exp())?;
        Ok(Self {
            grid,
            values,
            shape: WindowShape::GaussianScaled(amplitude),
            normalization: WindowNormalization::Raw,
        })
    }

    /// A sampled window without an analytic tag.
    pub fn custom(
        grid: TensorGrid,
        values: GridFunction,
        normalization: WindowNormalization,
    ) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::Unsupported("windows are one-dimensional".into()));
        }
        if values.values().shape() != grid.shape().as_slice() {
            return Err(Error::DimensionMismatch(
                "window values do not match the window grid".into(),
            ));
        }
        if values.max_abs() == 0.0 {
            return Err(Error::InvalidValues("window is identically zero".into()));
        }
        Ok(Self {
            grid,
            values,
            shape: WindowShape::Custom,
            normalization,
        })
    }

    pub fn grid(&self) -> &TensorGrid {
        &self.grid
    }

    pub fn values(&self) -> &GridFunction {
        &self.values
    }

    pub fn shape(&self) -> WindowShape {
        self.shape
    }

    pub fn normalization(&self) -> WindowNormalization {
        self.normalization
    }

    /// Evaluate the window at an arbitrary point.
    pub fn eval(&self, t: f64) -> Complex64 {
        match self.shape {
            WindowShape::GaussianUnit => {
                Complex64::new(GAUSS_NORM * (-t * t / 2.0).exp(), 0.0)
            }
            WindowShape::GaussianScaled(a) => {
                Complex64::new(a * GAUSS_NORM * (-t * t / 2.0).exp(), 0.0)
            }
            WindowShape::Custom => {
                let pts = self.grid.axis(0).points();
                if t < pts[0] || t > pts[pts.len() - 1] {
                    return Complex64::new(0.0, 0.0);
                }
                let i = match pts.binary_search_by(|p| p.partial_cmp(&t).unwrap()) {
                    Ok(i) => return self.values.values()[[i]],
                    Err(i) => i,
                };
                let (a, b) = (pts[i - 1], pts[i]);
                let w = (t - a) / (b - a);
                let va = self.values.values()[[i - 1]];
                let vb = self.values.values()[[i]];
                va * (1.0 - w) + vb * w
            }
        }
    }

    /// Interval outside of which the window vanishes (for the overlap
    /// guard); `None` means effectively unbounded support.
    fn support(&self) -> Option<(f64, f64)> {
        match self.shape {
            WindowShape::Custom => {
                let pts = self.grid.axis(0).points();
                Some((pts[0], pts[pts.len() - 1]))
            }
            _ => None,
        }
    }
}

/// Samples of `V_g f` on a rectangular time-frequency grid; values are
/// indexed `[x, ξ]` (time axis outermost).
#[derive(Debug, Clone)]
pub struct TFGridFunction {
    x_axis: GridAxis,
    xi_axis: GridAxis,
    values: Array2<Complex64>,
}

impl TFGridFunction {
    pub fn new(x_axis: GridAxis, xi_axis: GridAxis, values: Array2<Complex64>) -> Result<Self> {
        if values.nrows() != x_axis.len() || values.ncols() != xi_axis.len() {
            return Err(Error::DimensionMismatch(format!(
                "TF values of shape {:?} on a {}x{} grid",
                values.shape(),
                x_axis.len(),
                xi_axis.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidValues("TF values must be finite".into()));
        }
        Ok(Self {
            x_axis,
            xi_axis,
            values,
        })
    }

    pub fn x_axis(&self) -> &GridAxis {
        &self.x_axis
    }

    pub fn xi_axis(&self) -> &GridAxis {
        &self.xi_axis
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    /// The underlying 2-axis tensor grid `(x, ξ)`.
    pub fn tf_grid(&self) -> TensorGrid {
        TensorGrid::new(vec![self.x_axis.clone(), self.xi_axis.clone()])
            .expect("two valid axes")
    }

    pub fn to_grid_function(&self) -> GridFunction {
        let grid = self.tf_grid();
        GridFunction::new(&grid, self.values.clone().into_dyn())
            .expect("validated at construction")
    }

    /// Discrete `L²` norm over the TF plane.
    pub fn l2_norm(&self) -> f64 {
        let mx = self.x_axis.measures();
        let mxi = self.xi_axis.measures();
        let mut acc = crate::kahan::Kahan::new();
        for ((i, j), z) in self.values.indexed_iter() {
            acc.add(z.norm_sqr() * mx[i] * mxi[j]);
        }
        acc.value().sqrt()
    }
}

/// Geometry of a time-frequency evaluation grid, symmetric about the
/// origin in both variables.
#[derive(Debug, Clone, Copy)]
pub struct TfPlan {
    pub x_extent: f64,
    pub x_step: f64,
    pub xi_extent: f64,
    pub xi_step: f64,
}

impl TfPlan {
    pub fn square(extent: f64, step: f64) -> Self {
        Self {
            x_extent: extent,
            x_step: step,
            xi_extent: extent,
            xi_step: step,
        }
    }

    pub fn x_axis(&self) -> Result<GridAxis> {
        symmetric_axis(self.x_extent, self.x_step)
    }

    pub fn xi_axis(&self) -> Result<GridAxis> {
        symmetric_axis(self.xi_extent, self.xi_step)
    }
}

/// Uniform nodes `-extent, …, extent` centered at zero.
pub fn symmetric_axis(extent: f64, step: f64) -> Result<GridAxis> {
    if !(extent > 0.0) || !(step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "axis needs positive extent and step, got extent={extent}, step={step}"
        )));
    }
    let half = (extent / step).round() as usize;
    if half == 0 {
        return Err(Error::InvalidParameter(
            "axis step exceeds the extent".into(),
        ));
    }
    GridAxis::uniform_nodes(-extent, extent, 2 * half + 1)
}

fn uniform_step(points: &[f64]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let h = points[1] - points[0];
    let ok = points
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-12 * h.abs());
    ok.then_some(h)
}

/// Core evaluation: rows of `V_g f` over `xs × xis`, parallel over `x`.
fn stft_rows(
    fvals: &[Complex64],
    ys: &[f64],
    ms: &[f64],
    g: &Window,
    xs: &[f64],
    xis: &[f64],
) -> Vec<Complex64> {
    let ny = ys.len();
    let step = uniform_step(ys);
    xs.par_iter()
        .flat_map_iter(|&x| {
            let h: Vec<Complex64> = (0..ny)
                .map(|a| fvals[a] * g.eval(ys[a] - x).conj() * ms[a])
                .collect();
            let mut row = Vec::with_capacity(xis.len());
            for &xi in xis {
                let mut acc = Complex64::new(0.0, 0.0);
                match step {
                    Some(dy) => {
                        // e^{-i y_a ξ} advanced by one complex multiply per
                        // sample; drift over the row is O(n·eps).
                        let mut w = Complex64::from_polar(1.0, -ys[0] * xi);
                        let adv = Complex64::from_polar(1.0, -dy * xi);
                        for &hv in &h {
                            acc += hv * w;
                            w *= adv;
                        }
                    }
                    None => {
                        for (a, &hv) in h.iter().enumerate() {
                            acc += hv * Complex64::from_polar(1.0, -ys[a] * xi);
                        }
                    }
                }
                row.push(acc);
            }
            row
        })
        .collect()
}

fn guard_stft(fgrid: &TensorGrid, g: &Window, xs: &[f64], xis: &[f64]) -> Result<()> {
    if fgrid.dim() != 1 {
        return Err(Error::Unsupported(
            "the transform is implemented for one spatial dimension".into(),
        ));
    }
    let ximax = xis.iter().fold(0.0f64, |m, &xi| m.max(xi.abs()));
    let dy = fgrid.axis(0).max_step();
    if ximax * dy > std::f64::consts::PI {
        return Err(Error::Aliasing(format!(
            "xi_max * dy = {} exceeds pi; refine the quadrature grid",
            ximax * dy
        )));
    }
    if let Some((lo, hi)) = g.support() {
        let ys = fgrid.axis(0).points();
        let (ymin, ymax) = (ys[0], ys[ys.len() - 1]);
        let xmin = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let xmax = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi < ymin - xmax || lo > ymax - xmin {
            return Err(Error::WindowOverlap(
                "window support does not meet the sample range for any translate".into(),
            ));
        }
    }
    Ok(())
}

/// `V_g f` on the time-frequency grid `x_axis × xi_axis`.
pub fn stft(
    f: &GridFunction,
    fgrid: &TensorGrid,
    g: &Window,
    x_axis: &GridAxis,
    xi_axis: &GridAxis,
) -> Result<TFGridFunction> {
    guard_stft(fgrid, g, x_axis.points(), xi_axis.points())?;
    if f.values().shape() != fgrid.shape().as_slice() {
        return Err(Error::DimensionMismatch(
            "function does not match its quadrature grid".into(),
        ));
    }
    let fvals: Vec<Complex64> = f.values().iter().cloned().collect();
    let flat = stft_rows(
        &fvals,
        fgrid.axis(0).points(),
        fgrid.axis(0).measures(),
        g,
        x_axis.points(),
        xi_axis.points(),
    );
    let values = Array2::from_shape_vec((x_axis.len(), xi_axis.len()), flat)
        .expect("row-major rows of matching size");
    TFGridFunction::new(x_axis.clone(), xi_axis.clone(), values)
}

/// Modulation norm with possibly infinite exponents (used for dual-side
/// norms): the mixed `(e_x, e_xi)` norm of `|V_g f| · w` over the TF plane.
pub fn modulation_norm_exponents(
    f: &GridFunction,
    fgrid: &TensorGrid,
    g: &Window,
    ex: Exponent,
    exi: Exponent,
    w: &SeparableWeight,
    plan: &TfPlan,
) -> Result<f64> {
    let tf = stft(f, fgrid, g, &plan.x_axis()?, &plan.xi_axis()?)?;
    tf_mixed_norm(&tf, ex, exi, w)
}

/// Mixed `(e_x, e_xi)` norm of an already computed transform.
pub fn tf_mixed_norm(
    tf: &TFGridFunction,
    ex: Exponent,
    exi: Exponent,
    w: &SeparableWeight,
) -> Result<f64> {
    let tuple = ExponentTuple::from_exponents(&[ex, exi])?;
    let grid = tf.tf_grid();
    mixed_norm(
        &tf.to_grid_function(),
        &tuple,
        &Weight::Separable(w.clone()),
        &grid,
    )
}

/// `‖f‖_{M_w^{p,q}}`: the `(p, q)` mixed norm of `V_g f · w`, `p` over the
/// time axis (inner), `q` over frequency (outer).
pub fn modulation_norm(
    f: &GridFunction,
    fgrid: &TensorGrid,
    g: &Window,
    p: f64,
    q: f64,
    w: &SeparableWeight,
    plan: &TfPlan,
) -> Result<f64> {
    check_pq(p, q)?;
    modulation_norm_exponents(
        f,
        fgrid,
        g,
        Exponent::Finite(p),
        Exponent::Finite(q),
        w,
        plan,
    )
}

fn check_pq(p: f64, q: f64) -> Result<()> {
    if !(1.0..f64::INFINITY).contains(&p) || !(1.0..f64::INFINITY).contains(&q) {
        return Err(Error::InvalidExponent(format!(
            "modulation norm needs p, q in [1, inf), got p={p}, q={q}"
        )));
    }
    Ok(())
}

/// Samples of `V_g f` on the lattice `αZ × βZ` truncated to
/// `|k| ≤ kmax, |l| ≤ lmax`, with the restricted weight values.
#[derive(Debug, Clone)]
pub struct LatticeCoefficients {
    alpha: f64,
    beta: f64,
    kmin: i64,
    kmax: i64,
    lmin: i64,
    lmax: i64,
    coeffs: Array2<Complex64>,
    weights: Array2<f64>,
    weight_tag: String,
}

impl LatticeCoefficients {
    /// Symmetric lattice `k = -kmax..=kmax`, `l = -lmax..=lmax`; `coeffs`
    /// row-major over `(k, l)`.
    pub fn from_parts(
        alpha: f64,
        beta: f64,
        kmax: i64,
        lmax: i64,
        coeffs: Vec<Complex64>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        if !(alpha > 0.0) || !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lattice steps must be positive, got alpha={alpha}, beta={beta}"
            )));
        }
        if kmax < 0 || lmax < 0 {
            return Err(Error::InvalidParameter(
                "lattice bounds must be non-negative".into(),
            ));
        }
        Self::build(alpha, beta, -kmax, kmax, -lmax, lmax, coeffs, weights)
    }

    /// Rectangular index block `k = 0..nk-1`, `l = 0..nl-1` (sequence-norm
    /// tests that do not come from a symmetric truncation).
    pub fn from_grid_of(
        alpha: f64,
        beta: f64,
        nk: usize,
        nl: usize,
        coeffs: Vec<Complex64>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        if nk == 0 || nl == 0 {
            return Err(Error::Empty("lattice has no coefficients".into()));
        }
        Self::build(
            alpha,
            beta,
            0,
            nk as i64 - 1,
            0,
            nl as i64 - 1,
            coeffs,
            weights,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        alpha: f64,
        beta: f64,
        kmin: i64,
        kmax: i64,
        lmin: i64,
        lmax: i64,
        coeffs: Vec<Complex64>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        let nk = (kmax - kmin + 1) as usize;
        let nl = (lmax - lmin + 1) as usize;
        if coeffs.len() != nk * nl {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients, got {}",
                nk * nl,
                coeffs.len()
            )));
        }
        let coeffs = Array2::from_shape_vec((nk, nl), coeffs).expect("sized above");
        let weights = match weights {
            None => Array2::from_elem((nk, nl), 1.0),
            Some(w) => {
                if w.len() != nk * nl {
                    return Err(Error::DimensionMismatch(format!(
                        "expected {} weight values, got {}",
                        nk * nl,
                        w.len()
                    )));
                }
                if w.iter().any(|x| !x.is_finite() || *x <= 0.0) {
                    return Err(Error::InvalidWeight(
                        "lattice weights must be finite and strictly positive".into(),
                    ));
                }
                Array2::from_shape_vec((nk, nl), w).expect("sized above")
            }
        };
        Ok(Self {
            alpha,
            beta,
            kmin,
            kmax,
            lmin,
            lmax,
            coeffs,
            weights,
            weight_tag: "const:1".into(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn k_range(&self) -> (i64, i64) {
        (self.kmin, self.kmax)
    }

    pub fn l_range(&self) -> (i64, i64) {
        (self.lmin, self.lmax)
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn weight_tag(&self) -> &str {
        &self.weight_tag
    }
}

/// Gabor coefficients `a_{kl} = V_g f(αk, βl)` with restricted weight
/// `w̃(αk, βl) = w(αk, βl)`. The boundary ring of the truncated lattice
/// must carry modulus below `1e-10`, otherwise the truncation is rejected.
#[allow(clippy::too_many_arguments)]
pub fn gabor_coeffs(
    f: &GridFunction,
    fgrid: &TensorGrid,
    g: &Window,
    alpha: f64,
    beta: f64,
    kmax: i64,
    lmax: i64,
    w: &SeparableWeight,
) -> Result<LatticeCoefficients> {
    if !(alpha > 0.0) || !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lattice steps must be positive, got alpha={alpha}, beta={beta}"
        )));
    }
    if kmax < 0 || lmax < 0 {
        return Err(Error::InvalidParameter(
            "lattice bounds must be non-negative".into(),
        ));
    }
    if w.dim() != 2 {
        return Err(Error::DimensionMismatch(
            "lattice weight must live on the (x, xi) plane".into(),
        ));
    }
    let xs: Vec<f64> = (-kmax..=kmax).map(|k| alpha * k as f64).collect();
    let xis: Vec<f64> = (-lmax..=lmax).map(|l| beta * l as f64).collect();
    guard_stft(fgrid, g, &xs, &xis)?;
    if f.values().shape() != fgrid.shape().as_slice() {
        return Err(Error::DimensionMismatch(
            "function does not match its quadrature grid".into(),
        ));
    }
    let fvals: Vec<Complex64> = f.values().iter().cloned().collect();
    let flat = stft_rows(
        &fvals,
        fgrid.axis(0).points(),
        fgrid.axis(0).measures(),
        g,
        &xs,
        &xis,
    );
    let (nk, nl) = (xs.len(), xis.len());
    let coeffs = Array2::from_shape_vec((nk, nl), flat).expect("row-major rows");

    // Boundary-ring mass check.
    let mut ring_max = 0.0f64;
    for ((i, j), z) in coeffs.indexed_iter() {
        if i == 0 || i + 1 == nk || j == 0 || j + 1 == nl {
            ring_max = ring_max.max(z.norm());
        }
    }
    if ring_max >= 1e-10 {
        return Err(Error::Truncation(format!(
            "boundary-ring modulus {ring_max:.3e} >= 1e-10; enlarge the lattice bounds"
        )));
    }

    let mut weights = Array2::from_elem((nk, nl), 1.0);
    for ((i, j), wv) in weights.indexed_iter_mut() {
        *wv = w.eval(&[xs[i], xis[j]]);
    }
    let mut lattice = LatticeCoefficients::from_parts(
        alpha,
        beta,
        kmax,
        lmax,
        coeffs.iter().cloned().collect(),
        Some(weights.iter().cloned().collect()),
    )?;
    lattice.weight_tag = w.tag();
    Ok(lattice)
}

/// Ratio of the lattice sequence norm to the continuous modulation norm;
/// finite and positive for nonzero `f`.
#[allow(clippy::too_many_arguments)]
pub fn equivalence_ratio(
    f: &GridFunction,
    fgrid: &TensorGrid,
    g: &Window,
    p: f64,
    q: f64,
    w: &SeparableWeight,
    alpha: f64,
    beta: f64,
    kmax: i64,
    lmax: i64,
    plan: &TfPlan,
) -> Result<f64> {
    check_pq(p, q)?;
    let lattice = gabor_coeffs(f, fgrid, g, alpha, beta, kmax, lmax, w)?;
    let seq = crate::mixed_norm::seq_mixed_norm(&lattice, p, q)?;
    let cont = modulation_norm(f, fgrid, g, p, q, w, plan)?;
    if cont == 0.0 {
        return Err(Error::ZeroDenominator(
            "modulation norm vanishes; the ratio is undefined for f = 0".into(),
        ));
    }
    Ok(seq / cont)
}

/// Plain transform `f̂(ξ) = Σ_y f(y) e^{-iyξ} m(y)` on the given frequency
/// axis (dense O(N²) evaluation).
pub fn fourier_transform(
    f: &GridFunction,
    fgrid: &TensorGrid,
    freq_axis: &GridAxis,
) -> Result<(GridFunction, TensorGrid)> {
    if fgrid.dim() != 1 {
        return Err(Error::Unsupported(
            "the transform is implemented for one spatial dimension".into(),
        ));
    }
    let ximax = freq_axis
        .points()
        .iter()
        .fold(0.0f64, |m, &xi| m.max(xi.abs()));
    if ximax * fgrid.axis(0).max_step() > std::f64::consts::PI {
        return Err(Error::Aliasing(
            "frequency axis exceeds the Nyquist range of the quadrature grid".into(),
        ));
    }
    let ys = fgrid.axis(0).points();
    let ms = fgrid.axis(0).measures();
    let fvals: Vec<Complex64> = f.values().iter().cloned().collect();
    let step = uniform_step(ys);
    let values: Vec<Complex64> = freq_axis
        .points()
        .par_iter()
        .map(|&xi| {
            let mut acc = Complex64::new(0.0, 0.0);
            match step {
                Some(dy) => {
                    let mut w = Complex64::from_polar(1.0, -ys[0] * xi);
                    let adv = Complex64::from_polar(1.0, -dy * xi);
                    for (a, &fv) in fvals.iter().enumerate() {
                        acc += fv * ms[a] * w;
                        w *= adv;
                    }
                }
                None => {
                    for (a, &fv) in fvals.iter().enumerate() {
                        acc += fv * ms[a] * Complex64::from_polar(1.0, -ys[a] * xi);
                    }
                }
            }
            acc
        })
        .collect();
    let grid = TensorGrid::new(vec![freq_axis.clone()])?;
    let ghat = GridFunction::new(
        &grid,
        ndarray::Array1::from_vec(values).into_dyn(),
    )?;
    Ok((ghat, grid))
}

/// Wiener-amalgam norm through the Fourier transform:
/// `‖f‖_{W_w^{p,q}} = ‖f̂‖_{M_{w_0}^{q,p}}` with `w(x,ξ) = w_0(ξ,-x)`.
///
/// The modulation norm of `f̂` is taken against the window `ĝ/(2π)`, which
/// makes `‖·‖_{W^{p,p}}` with `w ≡ 1` agree with `‖·‖_{M^{p,p}}` exactly
/// rather than up to a constant.
#[allow(clippy::too_many_arguments)]
pub fn wiener_amalgam_norm(
    f: &GridFunction,
    fgrid: &TensorGrid,
    g: &Window,
    p: f64,
    q: f64,
    w: &SeparableWeight,
    plan: &TfPlan,
    freq_extent: f64,
    freq_step: f64,
) -> Result<f64> {
    check_pq(p, q)?;
    let freq_axis = symmetric_axis(freq_extent, freq_step)?;
    let (fhat, fhat_grid) = fourier_transform(f, fgrid, &freq_axis)?;

    let two_pi = 2.0 * std::f64::consts::PI;
    let transformed_window = match g.shape() {
        WindowShape::GaussianUnit => {
            // ĝ = √(2π)·(unit Gaussian), so ĝ/(2π) is the unit Gaussian
            // scaled by (2π)^{-1/2}.
            Window::gaussian_scaled(fhat_grid.clone(), 1.0 / two_pi.sqrt())?
        }
        WindowShape::GaussianScaled(a) => {
            Window::gaussian_scaled(fhat_grid.clone(), a / two_pi.sqrt())?
        }
        WindowShape::Custom => {
            let (ghat, _) = fourier_transform(g.values(), g.grid(), &freq_axis)?;
            let scaled = ghat.scale(Complex64::new(1.0 / two_pi, 0.0));
            Window::custom(fhat_grid.clone(), scaled, WindowNormalization::Raw)?
        }
    };

    let swapped = TfPlan {
        x_extent: plan.xi_extent,
        x_step: plan.xi_step,
        xi_extent: plan.x_extent,
        xi_step: plan.x_step,
    };
    modulation_norm(
        &fhat,
        &fhat_grid,
        &transformed_window,
        q,
        p,
        &w.rotate_tf()?,
        &swapped,
    )
}
