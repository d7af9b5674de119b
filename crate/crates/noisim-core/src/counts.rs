//! Shot histograms and multinomial sampling.
//!
//! Bitstring keys are MSB-first with qubit 0 rightmost (`bit_order:
//! "q0-lsb"`), matching the convention documented in [`crate::circuit`].

use std::collections::BTreeMap;

use rand::{RngExt, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::circuit::{bitstring_to_index, index_to_bitstring};
use crate::error::{Error, Result};

/// Outcome counts over measured bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountsHistogram {
    pub num_bits: usize,
    pub shots: u64,
    pub counts: BTreeMap<u64, u64>,
}

impl CountsHistogram {
    pub fn new(num_bits: usize) -> Self {
        Self {
            num_bits,
            shots: 0,
            counts: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, outcome: u64) {
        *self.counts.entry(outcome).or_insert(0) += 1;
        self.shots += 1;
    }

    pub fn merge(&mut self, other: &CountsHistogram) {
        for (&k, &v) in &other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        self.shots += other.shots;
    }

    pub fn count_of(&self, outcome: u64) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    /// Relative frequencies as a dense vector.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1 << self.num_bits];
        for (&k, &v) in &self.counts {
            out[k as usize] = v as f64 / self.shots as f64;
        }
        out
    }

    /// (state, weight) pairs for the likelihood fits.
    pub fn weighted_states(&self) -> Vec<(u64, f64)> {
        self.counts.iter().map(|(&k, &v)| (k, v as f64)).collect()
    }
}

/// Draw a multinomial sample from an exact distribution; reproducible under
/// a fixed seed.
pub fn sample_counts(probs: &[f64], num_bits: usize, shots: u64, seed: u64) -> Result<CountsHistogram> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be positive".into()));
    }
    if probs.len() != 1 << num_bits {
        return Err(Error::DimensionMismatch(probs.len(), 1 << num_bits));
    }
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p.max(0.0);
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut histogram = CountsHistogram::new(num_bits);
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c < u).min(probs.len() - 1);
        histogram.record(idx as u64);
    }
    Ok(histogram)
}

// --- JSON forms --------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CountsJson {
    shots: u64,
    counts: BTreeMap<String, u64>,
    bit_order: String,
}

impl Serialize for CountsHistogram {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CountsJson {
            shots: self.shots,
            counts: self
                .counts
                .iter()
                .map(|(&k, &v)| (index_to_bitstring(k, self.num_bits), v))
                .collect(),
            bit_order: "q0-lsb".into(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CountsHistogram {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw = CountsJson::deserialize(deserializer)?;
        if raw.bit_order != "q0-lsb" {
            return Err(DeError::custom(format!(
                "unsupported bit order `{}`",
                raw.bit_order
            )));
        }
        let num_bits = raw.counts.keys().map(|k| k.len()).max().unwrap_or(0);
        let mut counts = BTreeMap::new();
        let mut total = 0u64;
        for (key, v) in raw.counts {
            if key.len() != num_bits {
                return Err(DeError::custom("bitstring keys have mixed widths"));
            }
            let idx = bitstring_to_index(&key).map_err(DeError::custom)?;
            counts.insert(idx, v);
            total += v;
        }
        if total != raw.shots {
            return Err(DeError::custom(format!(
                "counts sum to {total}, header says {} shots",
                raw.shots
            )));
        }
        Ok(CountsHistogram {
            num_bits,
            shots: raw.shots,
            counts,
        })
    }
}

/// Exact output distribution in the same key convention as the histograms.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    pub num_bits: usize,
    pub probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    probabilities: BTreeMap<String, f64>,
    bit_order: String,
}

impl Serialize for ExactDistribution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DistributionJson {
            probabilities: self
                .probs
                .iter()
                .enumerate()
                .map(|(i, &p)| (index_to_bitstring(i as u64, self.num_bits), p))
                .collect(),
            bit_order: "q0-lsb".into(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw = DistributionJson::deserialize(deserializer)?;
        if raw.bit_order != "q0-lsb" {
            return Err(DeError::custom(format!(
                "unsupported bit order `{}`",
                raw.bit_order
            )));
        }
        let num_bits = raw.probabilities.keys().map(|k| k.len()).max().unwrap_or(0);
        let mut probs = vec![0.0; 1 << num_bits];
        for (key, p) in raw.probabilities {
            if key.len() != num_bits {
                return Err(DeError::custom("bitstring keys have mixed widths"));
            }
            let idx = bitstring_to_index(&key).map_err(DeError::custom)? as usize;
            probs[idx] = p;
        }
        Ok(ExactDistribution { num_bits, probs })
    }
}
