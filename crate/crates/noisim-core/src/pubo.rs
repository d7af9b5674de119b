//! Polynomial unconstrained binary optimisation: the energy function E(x).
//!
//! Terms are kept as (variable-subset bitmask, coefficient) pairs, so
//! evaluation of a state is a handful of mask tests. Variables are binary
//! (0/1); multilinearity (x^2 = x) is folded in when polynomials are built
//! or multiplied.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::block_sum;

/// Register cap for exhaustive state-space enumeration (2^n states).
pub const DEFAULT_ENUMERATION_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct PuboPolynomial {
    pub num_vars: usize,
    /// Sorted by mask; the empty mask is the constant term.
    terms: Vec<(u64, f64)>,
}

impl PuboPolynomial {
    pub fn zero(num_vars: usize) -> Self {
        Self {
            num_vars,
            terms: Vec::new(),
        }
    }

    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        if num_vars > 63 {
            return Err(Error::InvalidParameter(
                "polynomials over more than 63 variables are not supported".into(),
            ));
        }
        let mut poly = Self::zero(num_vars);
        for (vars, coeff) in terms {
            if !coeff.is_finite() {
                return Err(Error::InvalidParameter("non-finite coefficient".into()));
            }
            let mut mask = 0u64;
            for &v in &vars {
                if v >= num_vars {
                    return Err(Error::InvalidParameter(format!(
                        "variable {v} out of range (polynomial has {num_vars})"
                    )));
                }
                mask |= 1 << v;
            }
            poly.add_term(mask, coeff);
        }
        Ok(poly)
    }

    pub fn add_term(&mut self, mask: u64, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        match self.terms.binary_search_by_key(&mask, |t| t.0) {
            Ok(pos) => {
                self.terms[pos].1 += coeff;
                if self.terms[pos].1 == 0.0 {
                    self.terms.remove(pos);
                }
            }
            Err(pos) => self.terms.insert(pos, (mask, coeff)),
        }
    }

    pub fn add_polynomial(&mut self, other: &PuboPolynomial) {
        for &(mask, coeff) in &other.terms {
            self.add_term(mask, coeff);
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c * factor != 0.0)
                .map(|&(m, c)| (m, c * factor))
                .collect(),
        }
    }

    /// Multilinear product: x_S * x_T = x_{S union T}.
    pub fn multiply(&self, other: &PuboPolynomial) -> Self {
        let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
        for &(ma, ca) in &self.terms {
            for &(mb, cb) in &other.terms {
                *acc.entry(ma | mb).or_insert(0.0) += ca * cb;
            }
        }
        Self {
            num_vars: self.num_vars.max(other.num_vars),
            terms: acc.into_iter().filter(|(_, c)| *c != 0.0).collect(),
        }
    }

    pub fn terms(&self) -> &[(u64, f64)] {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|(m, _)| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// E(x) for the assignment encoded in the bits of `x`.
    #[inline]
    pub fn evaluate(&self, x: u64) -> f64 {
        let mut acc = 0.0;
        for &(mask, coeff) in &self.terms {
            if x & mask == mask {
                acc += coeff;
            }
        }
        acc
    }

    pub fn evaluate_bits(&self, bits: &[u8]) -> Result<f64> {
        if bits.len() != self.num_vars {
            return Err(Error::DimensionMismatch(bits.len(), self.num_vars));
        }
        let mut x = 0u64;
        for (i, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(Error::InvalidParameter("bits must be 0 or 1".into()));
            }
            x |= (b as u64) << i;
        }
        Ok(self.evaluate(x))
    }

    pub fn state_count(&self) -> u64 {
        1u64 << self.num_vars
    }

    fn check_enumeration(&self, limit: usize) -> Result<()> {
        if self.num_vars > limit {
            return Err(Error::RegisterTooLarge {
                qubits: self.num_vars,
                limit,
            });
        }
        Ok(())
    }

    /// Exact spectrum extremes by exhaustive enumeration.
    pub fn spectrum_extremes(&self, limit: usize) -> Result<(f64, f64)> {
        self.check_enumeration(limit)?;
        let count = self.state_count();
        // min/max are associative and exact, so the blocked parallel reduce
        // is bit-stable.
        const BLOCK: u64 = 1 << 14;
        let blocks = count.div_ceil(BLOCK);
        let partial = |blk: u64| -> (f64, f64) {
            let lo = blk * BLOCK;
            let hi = (lo + BLOCK).min(count);
            let mut mn = f64::INFINITY;
            let mut mx = f64::NEG_INFINITY;
            for x in lo..hi {
                let e = self.evaluate(x);
                mn = mn.min(e);
                mx = mx.max(e);
            }
            (mn, mx)
        };
        #[cfg(feature = "parallel")]
        let partials: Vec<(f64, f64)> = {
            use rayon::prelude::*;
            (0..blocks).into_par_iter().map(partial).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let partials: Vec<(f64, f64)> = (0..blocks).map(partial).collect();
        Ok(partials
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (x, y)| {
                (a.min(x), b.max(y))
            }))
    }

    /// Ground-state summary by brute force: minimum energy, the lowest
    /// bitstring attaining it, and the degeneracy (states within a relative
    /// 1e-9 of the minimum).
    pub fn ground_state(&self, limit: usize) -> Result<GroundState> {
        let (min_energy, _) = self.spectrum_extremes(limit)?;
        let tol = 1e-9 * min_energy.abs().max(1.0);
        let count = self.state_count();
        let degeneracy = block_sum(count, |x| {
            if self.evaluate(x) <= min_energy + tol {
                1.0
            } else {
                0.0
            }
        }) as u64;
        let mut state = 0u64;
        for x in 0..count {
            if self.evaluate(x) <= min_energy + tol {
                state = x;
                break;
            }
        }
        Ok(GroundState {
            energy: min_energy,
            state,
            degeneracy,
        })
    }

    /// All minimising states (small registers only).
    pub fn minimizers(&self, limit: usize) -> Result<Vec<u64>> {
        let (min_energy, _) = self.spectrum_extremes(limit)?;
        let tol = 1e-9 * min_energy.abs().max(1.0);
        Ok((0..self.state_count())
            .filter(|&x| self.evaluate(x) <= min_energy + tol)
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    /// Lowest bitstring value among the minimisers.
    pub state: u64,
    pub degeneracy: u64,
}

// --- JSON form ---------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermJson {
    vars: Vec<usize>,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
struct PuboJson {
    n: usize,
    terms: Vec<TermJson>,
}

impl Serialize for PuboPolynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PuboJson {
            n: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|&(mask, coeff)| TermJson {
                    vars: (0..self.num_vars).filter(|v| mask >> v & 1 == 1).collect(),
                    coeff,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PuboPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw = PuboJson::deserialize(deserializer)?;
        PuboPolynomial::from_terms(raw.n, raw.terms.into_iter().map(|t| (t.vars, t.coeff)))
            .map_err(DeError::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_polynomial_evaluates_to_zero() {
        let p = PuboPolynomial::zero(3);
        assert_eq!(p.evaluate(0b101), 0.0);
        assert_eq!(p.degree(), 0);
    }

    #[test]
    fn small_evaluation_example() {
        // E = 3 x0 x1 - x1
        let p = PuboPolynomial::from_terms(2, vec![(vec![0, 1], 3.0), (vec![1], -1.0)]).unwrap();
        assert_eq!(p.evaluate(0b11), 2.0);
        assert_eq!(p.evaluate(0b10), -1.0);
        assert_eq!(p.evaluate(0b00), 0.0);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn duplicate_terms_are_combined() {
        let p = PuboPolynomial::from_terms(2, vec![(vec![0], 1.0), (vec![0], 2.0)]).unwrap();
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.evaluate(0b01), 3.0);
    }

    #[test]
    fn multiply_is_multilinear() {
        // (x0)(x0 + x1) = x0 + x0 x1
        let a = PuboPolynomial::from_terms(2, vec![(vec![0], 1.0)]).unwrap();
        let b = PuboPolynomial::from_terms(2, vec![(vec![0], 1.0), (vec![1], 1.0)]).unwrap();
        let prod = a.multiply(&b);
        assert_eq!(prod.evaluate(0b01), 1.0);
        assert_eq!(prod.evaluate(0b11), 2.0);
        assert_eq!(prod.evaluate(0b10), 0.0);
    }

    #[test]
    fn ground_state_search_finds_degenerate_minima() {
        // E = (x0 + x1 - 1)^2 = x0 + x1 + 2 x0 x1 - 2 x0 - 2 x1 + 1
        let p = PuboPolynomial::from_terms(
            2,
            vec![
                (vec![], 1.0),
                (vec![0], -1.0),
                (vec![1], -1.0),
                (vec![0, 1], 2.0),
            ],
        )
        .unwrap();
        let ground = p.ground_state(24).unwrap();
        assert_eq!(ground.energy, 0.0);
        assert_eq!(ground.degeneracy, 2);
        assert_eq!(ground.state, 0b01);
        assert_eq!(p.minimizers(24).unwrap(), vec![0b01, 0b10]);
    }

    #[test]
    fn enumeration_limit_is_enforced() {
        let p = PuboPolynomial::zero(30);
        assert!(matches!(
            p.spectrum_extremes(24),
            Err(Error::RegisterTooLarge { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let p = PuboPolynomial::from_terms(
            4,
            vec![(vec![0, 1], 2.0), (vec![], 1.0), (vec![3], -0.5)],
        )
        .unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: PuboPolynomial = serde_json::from_str(&text).unwrap();
        assert_eq!(p, back);
    }
}
