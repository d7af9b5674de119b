//! Linear-ramp QAOA circuit generation from an energy polynomial.
//!
//! The cost Hamiltonian comes from the binary-to-spin substitution
//! x = (1 - z) / 2; constants are dropped as global phase. Each spin term
//! becomes one phase gadget, the mixer is an Rx layer, and the parameters
//! follow fixed linear ramps instead of classical optimisation:
//! beta_j = ((j - 1) / p - 1) * d_beta and gamma_j = (j / p) * d_gamma
//! for layers j = 1..=p.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::pubo::PuboPolynomial;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrSchedule {
    pub layers: usize,
    pub delta_beta: f64,
    pub delta_gamma: f64,
}

impl LrSchedule {
    pub fn new(layers: usize, delta_beta: f64, delta_gamma: f64) -> Result<Self> {
        if layers == 0 {
            return Err(Error::InvalidParameter("need at least one layer".into()));
        }
        for (name, v) in [("delta_beta", delta_beta), ("delta_gamma", delta_gamma)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} outside [0, 1]"
                )));
            }
        }
        Ok(Self {
            layers,
            delta_beta,
            delta_gamma,
        })
    }

    /// Ramp sizes 0.5 at the requested depth.
    pub fn with_default_ramps(layers: usize) -> Result<Self> {
        Self::new(layers, 0.5, 0.5)
    }

    pub fn betas(&self) -> Vec<f64> {
        let p = self.layers as f64;
        (1..=self.layers)
            .map(|j| ((j as f64 - 1.0) / p - 1.0) * self.delta_beta)
            .collect()
    }

    pub fn gammas(&self) -> Vec<f64> {
        let p = self.layers as f64;
        (1..=self.layers)
            .map(|j| (j as f64 / p) * self.delta_gamma)
            .collect()
    }
}

/// Spin form of a binary polynomial: weights over Z-operator subsets plus
/// the dropped constant. Under x_i = (1 - z_i) / 2 a term c * prod x_i
/// expands to c 2^{-|S|} sum_{T subseteq S} (-1)^{|T|} z_T.
pub fn binary_to_spin(energy: &PuboPolynomial) -> (BTreeMap<u64, f64>, f64) {
    let mut weights: BTreeMap<u64, f64> = BTreeMap::new();
    let mut constant = 0.0;
    for &(mask, coeff) in energy.terms() {
        let vars: Vec<u64> = (0..64).filter(|b| mask >> b & 1 == 1).collect();
        let k = vars.len();
        let scale = coeff / (1u64 << k) as f64;
        for subset in 0..(1u64 << k) {
            let mut zmask = 0u64;
            for (pos, &v) in vars.iter().enumerate() {
                if subset >> pos & 1 == 1 {
                    zmask |= 1 << v;
                }
            }
            let signed = if subset.count_ones() % 2 == 0 {
                scale
            } else {
                -scale
            };
            if zmask == 0 {
                constant += signed;
            } else {
                *weights.entry(zmask).or_insert(0.0) += signed;
            }
        }
    }
    weights.retain(|_, w| *w != 0.0);
    (weights, constant)
}

/// Phase gadgets implementing exp(-i gamma H_C) up to global phase; the
/// diagonal equals e^{-i gamma E(x)} times one overall factor.
pub fn cost_block(energy: &PuboPolynomial, gamma: f64) -> Vec<(GateKind, Vec<usize>)> {
    let (weights, _constant) = binary_to_spin(energy);
    weights
        .into_iter()
        .map(|(zmask, w)| {
            let qubits: Vec<usize> = (0..energy.num_vars).filter(|q| zmask >> q & 1 == 1).collect();
            (GateKind::PhaseGadget(2.0 * gamma * w), qubits)
        })
        .collect()
}

/// Full LR-QAOA circuit: Hadamard layer, alternating cost and mixer blocks,
/// terminal measurement of every qubit.
pub fn lr_qaoa_circuit(energy: &PuboPolynomial, schedule: &LrSchedule) -> Result<Circuit> {
    if energy.num_vars == 0 {
        return Err(Error::InvalidParameter(
            "energy polynomial has no variables".into(),
        ));
    }
    let n = energy.num_vars;
    let mut circuit = Circuit::new(n);
    for q in 0..n {
        circuit.push(GateKind::H, vec![q]);
    }
    let betas = schedule.betas();
    let gammas = schedule.gammas();
    for (beta, gamma) in betas.iter().zip(&gammas) {
        for (kind, qubits) in cost_block(energy, *gamma) {
            circuit.push(kind, qubits);
        }
        for q in 0..n {
            circuit.push(GateKind::Rx(2.0 * beta), vec![q]);
        }
    }
    for q in 0..n {
        circuit.push(GateKind::Measure, vec![q]);
    }
    circuit.metadata.insert("depth_p".into(), schedule.layers.to_string());
    circuit.validate()?;
    Ok(circuit)
}
