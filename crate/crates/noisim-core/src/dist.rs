//! Distances between outcome distributions.
//!
//! HD(p, q) = sqrt( 1/2 sum_i (sqrt(p_i) - sqrt(q_i))^2 ) and the classical
//! fidelity F(p, q) = sum_i sqrt(p_i q_i) are tied by HD^2 = 1 - F. Total
//! variation, Jensen-Shannon (natural log, so the range is [0, ln 2]) and
//! Kullback-Leibler round out the set.

use std::collections::BTreeMap;

use crate::counts::CountsHistogram;
use crate::error::{Error, Result};

/// A probability distribution over bitstrings; dense for small registers,
/// sparse above 20 bits.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Dense { num_bits: usize, probs: Vec<f64> },
    Sparse { num_bits: usize, probs: BTreeMap<u64, f64> },
}

const DENSE_BIT_LIMIT: usize = 20;

impl Distribution {
    pub fn from_probs(num_bits: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1 << num_bits {
            return Err(Error::DimensionMismatch(probs.len(), 1 << num_bits));
        }
        let d = Distribution::Dense { num_bits, probs };
        d.validate()?;
        Ok(d)
    }

    pub fn from_counts(counts: &CountsHistogram) -> Self {
        let num_bits = counts.num_bits;
        let total = counts.shots as f64;
        if num_bits <= DENSE_BIT_LIMIT {
            let mut probs = vec![0.0; 1 << num_bits];
            for (&k, &v) in &counts.counts {
                probs[k as usize] = v as f64 / total;
            }
            Distribution::Dense { num_bits, probs }
        } else {
            Distribution::Sparse {
                num_bits,
                probs: counts
                    .counts
                    .iter()
                    .map(|(&k, &v)| (k, v as f64 / total))
                    .collect(),
            }
        }
    }

    pub fn num_bits(&self) -> usize {
        match self {
            Distribution::Dense { num_bits, .. } | Distribution::Sparse { num_bits, .. } => {
                *num_bits
            }
        }
    }

    pub fn probability(&self, state: u64) -> f64 {
        match self {
            Distribution::Dense { probs, .. } => probs.get(state as usize).copied().unwrap_or(0.0),
            Distribution::Sparse { probs, .. } => probs.get(&state).copied().unwrap_or(0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let entries = self.support();
        if entries.iter().any(|(_, p)| *p < -1e-12) {
            return Err(Error::InvalidParameter(
                "distribution has negative entries".into(),
            ));
        }
        let sum: f64 = entries.iter().map(|(_, p)| p).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "distribution sums to {sum}, not 1"
            )));
        }
        Ok(())
    }

    /// Non-zero entries, sorted by state.
    pub fn support(&self) -> Vec<(u64, f64)> {
        match self {
            Distribution::Dense { probs, .. } => probs
                .iter()
                .enumerate()
                .filter(|(_, &p)| p != 0.0)
                .map(|(i, &p)| (i as u64, p))
                .collect(),
            Distribution::Sparse { probs, .. } => {
                probs.iter().filter(|(_, &p)| p != 0.0).map(|(&k, &v)| (k, v)).collect()
            }
        }
    }
}

/// Pairs (p_i, q_i) over the union of both supports. Terms where both sides
/// vanish contribute nothing to any of the metrics here, so they are skipped.
fn paired(p: &Distribution, q: &Distribution) -> Result<Vec<(f64, f64)>> {
    if p.num_bits() != q.num_bits() {
        return Err(Error::DimensionMismatch(p.num_bits(), q.num_bits()));
    }
    let a = p.support();
    let b = q.support();
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ka, pa)), Some(&(kb, qb))) => {
                if ka == kb {
                    out.push((pa, qb));
                    i += 1;
                    j += 1;
                } else if ka < kb {
                    out.push((pa, 0.0));
                    i += 1;
                } else {
                    out.push((0.0, qb));
                    j += 1;
                }
            }
            (Some(&(_, pa)), None) => {
                out.push((pa, 0.0));
                i += 1;
            }
            (None, Some(&(_, qb))) => {
                out.push((0.0, qb));
                j += 1;
            }
            (None, None) => break,
        }
    }
    Ok(out)
}

pub fn hellinger(p: &Distribution, q: &Distribution) -> Result<f64> {
    let sum: f64 = paired(p, q)?
        .into_iter()
        .map(|(a, b)| {
            let d = a.max(0.0).sqrt() - b.max(0.0).sqrt();
            d * d
        })
        .sum();
    Ok((0.5 * sum).sqrt().min(1.0))
}

pub fn classical_fidelity(p: &Distribution, q: &Distribution) -> Result<f64> {
    let sum: f64 = paired(p, q)?
        .into_iter()
        .map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt())
        .sum();
    Ok(sum.min(1.0))
}

pub fn total_variation(p: &Distribution, q: &Distribution) -> Result<f64> {
    let sum: f64 = paired(p, q)?.into_iter().map(|(a, b)| (a - b).abs()).sum();
    Ok(0.5 * sum)
}

/// KL(p || q) in nats; +inf when p puts mass outside q's support.
pub fn kullback_leibler(p: &Distribution, q: &Distribution) -> Result<f64> {
    let mut sum = 0.0;
    for (a, b) in paired(p, q)? {
        if a <= 0.0 {
            continue;
        }
        if b <= 0.0 {
            return Ok(f64::INFINITY);
        }
        sum += a * (a / b).ln();
    }
    Ok(sum.max(0.0))
}

/// Jensen-Shannon divergence in nats, bounded by ln 2.
pub fn jensen_shannon(p: &Distribution, q: &Distribution) -> Result<f64> {
    let mut sum = 0.0;
    for (a, b) in paired(p, q)? {
        let m = 0.5 * (a + b);
        if a > 0.0 {
            sum += 0.5 * a * (a / m).ln();
        }
        if b > 0.0 {
            sum += 0.5 * b * (b / m).ln();
        }
    }
    Ok(sum.clamp(0.0, std::f64::consts::LN_2))
}
