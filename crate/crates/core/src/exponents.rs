//! Exponent tuples `P = (p_1, …, p_n)` and their duals.
//!
//! Primal tuples are finite with every entry in `[1, ∞)`; the index `∞` is
//! admitted only in dual tuples, where `p = 1` forces `p' = ∞`. Each entry
//! stores its dual alongside it, so dualizing is an exact swap and the
//! involution `P'' = P` holds bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single integrability exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinite => 0.0,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Exponent::Finite(_))
    }

    pub fn finite_value(self) -> Option<f64> {
        match self {
            Exponent::Finite(p) => Some(p),
            Exponent::Infinite => None,
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Entry {
    exponent: Exponent,
    dual: Exponent,
}

/// The ordered tuple governing an iterated norm; axis `j` of a grid is
/// integrated with `p_{j+1}` (axis 0 innermost).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentTuple {
    entries: Vec<Entry>,
}

impl ExponentTuple {
    /// Build a primal tuple. Rejects entries below one, NaNs and infinities.
    pub fn new(exponents: &[f64]) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidExponent("tuple must be non-empty".into()));
        }
        let mut entries = Vec::with_capacity(exponents.len());
        for &p in exponents {
            if !p.is_finite() {
                return Err(Error::InvalidExponent(format!(
                    "entry {p} is not finite; infinity is admitted only in dual tuples"
                )));
            }
            if p < 1.0 {
                return Err(Error::InvalidExponent(format!("entry {p} is below one")));
            }
            let dual = if p == 1.0 {
                Exponent::Infinite
            } else {
                Exponent::Finite(p / (p - 1.0))
            };
            entries.push(Entry {
                exponent: Exponent::Finite(p),
                dual,
            });
        }
        Ok(Self { entries })
    }

    /// Constant tuple `(p, …, p)` of length `n`.
    pub fn constant(p: f64, n: usize) -> Result<Self> {
        Self::new(&vec![p; n])
    }

    /// Build a tuple that may contain `∞` entries (dual-side norms). Finite
    /// entries must still be at least one.
    pub fn from_exponents(exponents: &[Exponent]) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidExponent("tuple must be non-empty".into()));
        }
        let mut entries = Vec::with_capacity(exponents.len());
        for &e in exponents {
            match e {
                Exponent::Finite(p) => {
                    if !p.is_finite() || p < 1.0 {
                        return Err(Error::InvalidExponent(format!(
                            "finite entry must be in [1, inf), got {p}"
                        )));
                    }
                    let dual = if p == 1.0 {
                        Exponent::Infinite
                    } else {
                        Exponent::Finite(p / (p - 1.0))
                    };
                    entries.push(Entry { exponent: e, dual });
                }
                Exponent::Infinite => entries.push(Entry {
                    exponent: e,
                    dual: Exponent::Finite(1.0),
                }),
            }
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn exponent(&self, axis: usize) -> Exponent {
        self.entries[axis].exponent
    }

    pub fn exponents(&self) -> impl Iterator<Item = Exponent> + '_ {
        self.entries.iter().map(|e| e.exponent)
    }

    /// Last (outermost) exponent `p_n`.
    pub fn last(&self) -> Exponent {
        self.entries.last().expect("tuple is non-empty").exponent
    }

    /// Dual tuple `P'` with `1/p_j + 1/p_j' = 1`; an exact involution.
    pub fn dual(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|e| Entry {
                    exponent: e.dual,
                    dual: e.exponent,
                })
                .collect(),
        }
    }

    /// True when every entry is finite (a valid primal tuple).
    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|e| e.exponent.is_finite())
    }

    /// `Σ_j 1/p_j`.
    pub fn reciprocal_sum(&self) -> f64 {
        self.entries.iter().map(|e| e.exponent.reciprocal()).sum()
    }
}

impl std::fmt::Display for ExponentTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", e.exponent)?;
        }
        write!(f, ")")
    }
}

/// The duality map `P ↦ P'`; `(L_w^P)' = L_{w^{-1}}^{P'}`.
pub fn dual_exponents(p: &ExponentTuple) -> ExponentTuple {
    p.dual()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite(p: &ExponentTuple) -> Vec<f64> {
        p.exponents().map(|e| e.finite_value().unwrap()).collect()
    }

    #[test]
    fn self_dual_pair() {
        let p = ExponentTuple::new(&[2.0, 2.0]).unwrap();
        assert_eq!(finite(&dual_exponents(&p)), vec![2.0, 2.0]);
    }

    #[test]
    fn one_maps_to_infinity() {
        let p = ExponentTuple::new(&[1.0, 4.0]).unwrap();
        let d = dual_exponents(&p);
        assert_eq!(d.exponent(0), Exponent::Infinite);
        assert!((d.exponent(1).finite_value().unwrap() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn three_halves_dualizes_to_three() {
        let p = ExponentTuple::new(&[1.5, 3.0]).unwrap();
        let d = dual_exponents(&p);
        assert_eq!(finite(&d), vec![3.0, 1.5]);
    }

    #[test]
    fn dual_is_exact_involution() {
        let p = ExponentTuple::new(&[1.0, 1.7, 2.0, 3.9, 11.3]).unwrap();
        assert_eq!(dual_exponents(&dual_exponents(&p)), p);
    }

    #[test]
    fn holder_identity_within_tolerance() {
        for p in [1.0, 1.2, 1.5, 2.0, 3.0, 7.7] {
            let t = ExponentTuple::new(&[p]).unwrap();
            let d = t.dual();
            let s = t.exponent(0).reciprocal() + d.exponent(0).reciprocal();
            assert!((s - 1.0).abs() < 1e-15, "p={p}: {s}");
        }
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(ExponentTuple::new(&[0.9]).is_err());
        assert!(ExponentTuple::new(&[f64::INFINITY]).is_err());
        assert!(ExponentTuple::new(&[f64::NAN]).is_err());
        assert!(ExponentTuple::new(&[]).is_err());
    }
}
