//! Weights on product grids.
//!
//! [`SeparableWeight`] is a product `w(x_1,…,x_n) = Π_j w_j(x_j)` of
//! per-axis factors, which is exactly the structure required of admissible
//! weights; the polynomial-type factor uses the bracket `⟨t⟩ = 1 + |t|`,
//! which is submultiplicative with constant one. [`ElementaryWeight`] is a
//! finite positive combination of disjoint box indicators; it is zero off
//! its support, and its reciprocal is taken on the support only.
//!
//! All norms in this crate place the weight inside the innermost integrand
//! at full power: the integrand is `(|f|·w)^{p_1}`, matching the modulation
//! norm convention. Under that convention multiplication by `w` is an exact
//! isometry from the weighted onto the unweighted space, and the plain
//! pairing `⟨f,g⟩ = ∫ f g dμ` realizes the duality with `L_{w^{-1}}^{P'}`.

use ndarray::{ArrayD, IxDyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TensorGrid;
use crate::simple::BoxRegion;

/// One per-axis weight factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AxisWeight {
    Constant(f64),
    /// Bracket power `(1 + |t|)^s`.
    Bracket { s: f64 },
}

impl AxisWeight {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            AxisWeight::Constant(c) => c,
            AxisWeight::Bracket { s } => (1.0 + t.abs()).powf(s),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            AxisWeight::Constant(c) => {
                if !c.is_finite() || c <= 0.0 {
                    return Err(Error::InvalidWeight(format!(
                        "constant factor must be finite and positive, got {c}"
                    )));
                }
            }
            AxisWeight::Bracket { s } => {
                if !s.is_finite() {
                    return Err(Error::InvalidWeight("bracket power must be finite".into()));
                }
            }
        }
        Ok(())
    }

    fn inverse(&self) -> AxisWeight {
        match *self {
            AxisWeight::Constant(c) => AxisWeight::Constant(1.0 / c),
            AxisWeight::Bracket { s } => AxisWeight::Bracket { s: -s },
        }
    }
}

/// Product weight `w(x) = Π_j w_j(x_j)`; the factorization is exact by
/// construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableWeight {
    factors: Vec<AxisWeight>,
}

impl SeparableWeight {
    pub fn new(factors: Vec<AxisWeight>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidWeight("weight needs at least one factor".into()));
        }
        for f in &factors {
            f.validate()?;
        }
        Ok(Self { factors })
    }

    /// The constant weight 1 on `n` axes.
    pub fn one(n: usize) -> Self {
        Self {
            factors: vec![AxisWeight::Constant(1.0); n],
        }
    }

    /// Polynomial-type weight: bracket factor `(1+|t|)^s` on every axis.
    pub fn polynomial(n: usize, s: f64) -> Result<Self> {
        Self::new(vec![AxisWeight::Bracket { s }; n])
    }

    /// Modulation-space weight `(1 + |ξ|)^s`: constant on the `d` time axes,
    /// bracket on the `d` frequency axes.
    pub fn modulation(d: usize, s: f64) -> Result<Self> {
        let mut factors = vec![AxisWeight::Constant(1.0); d];
        factors.extend(vec![AxisWeight::Bracket { s }; d]);
        Self::new(factors)
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[AxisWeight] {
        &self.factors
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.factors.len());
        self.factors
            .iter()
            .zip(point)
            .map(|(f, &t)| f.eval(t))
            .product()
    }

    /// Reciprocal weight `w^{-1}` (factorwise).
    pub fn inverse(&self) -> SeparableWeight {
        SeparableWeight {
            factors: self.factors.iter().map(AxisWeight::inverse).collect(),
        }
    }

    /// Weight axes rotated for the Wiener-amalgam relation: if `w` lives on
    /// `(x, ξ)` then the rotated weight `w_0` satisfies `w_0(ξ, -x) = w(x, ξ)`.
    /// Every factor form here is even, so this is a swap of the two axis
    /// blocks.
    pub fn rotate_tf(&self) -> Result<SeparableWeight> {
        if self.factors.len() % 2 != 0 {
            return Err(Error::DimensionMismatch(
                "time-frequency weight needs an even number of axes".into(),
            ));
        }
        let d = self.factors.len() / 2;
        let mut factors = self.factors[d..].to_vec();
        factors.extend_from_slice(&self.factors[..d]);
        Ok(SeparableWeight { factors })
    }

    /// Short tag for reports: `const:<c>`, `poly:<s>`, `freq:<s>` or `mixed`.
    pub fn tag(&self) -> String {
        if let AxisWeight::Constant(c) = self.factors[0] {
            if self.factors.iter().all(|f| *f == self.factors[0]) {
                return format!("const:{c}");
            }
        }
        if let AxisWeight::Bracket { s } = self.factors[0] {
            if self.factors.iter().all(|f| *f == self.factors[0]) {
                return format!("poly:{s}");
            }
        }
        let d = self.factors.len() / 2;
        if self.factors.len() % 2 == 0 {
            if let AxisWeight::Bracket { s } = self.factors[d] {
                let time_one = self.factors[..d]
                    .iter()
                    .all(|f| *f == AxisWeight::Constant(1.0));
                let freq_bracket = self.factors[d..]
                    .iter()
                    .all(|f| *f == AxisWeight::Bracket { s });
                if time_one && freq_bracket {
                    return format!("freq:{s}");
                }
            }
        }
        "mixed".into()
    }

    fn sample(&self, grid: &TensorGrid) -> Result<ArrayD<f64>> {
        if grid.dim() != self.factors.len() {
            return Err(Error::DimensionMismatch(format!(
                "weight has {} factors but the grid has {} axes",
                self.factors.len(),
                grid.dim()
            )));
        }
        let per_axis: Vec<Vec<f64>> = self
            .factors
            .iter()
            .zip(grid.axes())
            .map(|(f, ax)| ax.points().iter().map(|&t| f.eval(t)).collect())
            .collect();
        let mut values = ArrayD::zeros(IxDyn(&grid.shape()));
        for (idx, v) in values.indexed_iter_mut() {
            *v = per_axis
                .iter()
                .enumerate()
                .map(|(j, col)| col[idx[j]])
                .product();
        }
        Ok(values)
    }
}

/// Finite positive combination of disjoint box indicators, `w = Σ_k γ_k 1_{B_k}`.
/// Zero off the union of the boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryWeight {
    boxes: Vec<BoxRegion>,
    gammas: Vec<f64>,
}

impl ElementaryWeight {
    pub fn new(boxes: Vec<BoxRegion>, gammas: Vec<f64>) -> Result<Self> {
        if boxes.len() != gammas.len() {
            return Err(Error::InvalidWeight(format!(
                "{} boxes but {} coefficients",
                boxes.len(),
                gammas.len()
            )));
        }
        if gammas.iter().any(|g| !g.is_finite() || *g <= 0.0) {
            return Err(Error::InvalidWeight(
                "elementary weight coefficients must be finite and positive".into(),
            ));
        }
        BoxRegion::check_pairwise_disjoint(&boxes)?;
        Ok(Self { boxes, gammas })
    }

    pub fn boxes(&self) -> &[BoxRegion] {
        &self.boxes
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// Coefficient of the box identical to `region`, if present.
    pub fn gamma_for(&self, region: &BoxRegion) -> Option<f64> {
        self.boxes
            .iter()
            .position(|b| b == region)
            .map(|i| self.gammas[i])
    }

    /// `1/w` on the support of `w`.
    pub fn inverse(&self) -> ElementaryWeight {
        ElementaryWeight {
            boxes: self.boxes.clone(),
            gammas: self.gammas.iter().map(|g| 1.0 / g).collect(),
        }
    }

    fn sample(&self, grid: &TensorGrid) -> Result<ArrayD<f64>> {
        let mut values = ArrayD::zeros(IxDyn(&grid.shape()));
        for (b, &gamma) in self.boxes.iter().zip(&self.gammas) {
            b.check_on_grid(grid)?;
            b.for_each_cell(|idx| values[IxDyn(idx)] = gamma);
        }
        Ok(values)
    }
}

/// A weight usable by the norm routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    Separable(SeparableWeight),
    Elementary(ElementaryWeight),
}

impl Weight {
    pub fn one(n: usize) -> Self {
        Weight::Separable(SeparableWeight::one(n))
    }

    /// Dense samples of the weight on the grid.
    pub fn sample(&self, grid: &TensorGrid) -> Result<ArrayD<f64>> {
        match self {
            Weight::Separable(w) => w.sample(grid),
            Weight::Elementary(w) => w.sample(grid),
        }
    }

    pub fn inverse(&self) -> Weight {
        match self {
            Weight::Separable(w) => Weight::Separable(w.inverse()),
            Weight::Elementary(w) => Weight::Elementary(w.inverse()),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            Weight::Separable(w) => w.tag(),
            Weight::Elementary(w) => format!("elementary:{}", w.boxes().len()),
        }
    }
}

impl From<SeparableWeight> for Weight {
    fn from(w: SeparableWeight) -> Self {
        Weight::Separable(w)
    }
}

impl From<ElementaryWeight> for Weight {
    fn from(w: ElementaryWeight) -> Self {
        Weight::Elementary(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn rejects_nonpositive_factors() {
        assert!(SeparableWeight::new(vec![AxisWeight::Constant(0.0)]).is_err());
        assert!(SeparableWeight::new(vec![AxisWeight::Constant(-1.0)]).is_err());
        assert!(SeparableWeight::new(vec![]).is_err());
    }

    #[test]
    fn product_structure_is_exact() {
        let w = SeparableWeight::new(vec![
            AxisWeight::Bracket { s: 1.5 },
            AxisWeight::Constant(2.0),
        ])
        .unwrap();
        let x = [0.7, -3.0];
        let by_axes = w.factors()[0].eval(x[0]) * w.factors()[1].eval(x[1]);
        assert_eq!(w.eval(&x), by_axes);
    }

    #[test]
    fn bracket_weight_is_submultiplicative() {
        // v(x+y) <= v(x) v(y) for v = Π (1+|t_j|)^s with s >= 0, sampled
        // over random triples of points.
        let mut rng = SplitMix64::new(11);
        for s in [0.0, 0.5, 1.0, 2.5] {
            let v = SeparableWeight::polynomial(3, s).unwrap();
            for _ in 0..500 {
                let x: Vec<f64> = (0..3).map(|_| rng.uniform_in(-10.0, 10.0)).collect();
                let y: Vec<f64> = (0..3).map(|_| rng.uniform_in(-10.0, 10.0)).collect();
                let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
                let lhs = v.eval(&xy);
                let rhs = v.eval(&x) * v.eval(&y);
                assert!(lhs <= rhs * (1.0 + 1e-12), "s={s}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn inverse_inverts_pointwise() {
        let w = SeparableWeight::modulation(1, 2.0).unwrap();
        let p = [1.3, -0.4];
        assert!((w.eval(&p) * w.inverse().eval(&p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tags_identify_standard_forms() {
        assert_eq!(SeparableWeight::one(2).tag(), "const:1");
        assert_eq!(SeparableWeight::polynomial(2, 1.0).unwrap().tag(), "poly:1");
        assert_eq!(SeparableWeight::modulation(1, 2.0).unwrap().tag(), "freq:2");
    }

    #[test]
    fn rotate_tf_swaps_axis_blocks() {
        let w = SeparableWeight::modulation(1, 3.0).unwrap();
        let r = w.rotate_tf().unwrap();
        // w(x, xi) = (1+|xi|)^3 and w0(a, b) = w(-b, a) = (1+|a|)^3.
        assert!((r.eval(&[2.0, 5.0]) - 27.0).abs() < 1e-12);
    }
}
