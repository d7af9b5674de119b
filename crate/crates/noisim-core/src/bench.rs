//! Benchmark circuit generators: idle decay, Hahn echo, tiled GHZ.

use crate::circuit::{Circuit, GateKind, Topology};
use crate::error::{Error, Result};

/// Relaxation probe: excite, idle for `t`, measure.
pub fn idle_t1_circuit(t: f64) -> Result<Circuit> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::InvalidParameter(format!("delay must be >= 0, got {t}")));
    }
    let mut c = Circuit::new(1);
    c.push(GateKind::X, vec![0]);
    c.push(GateKind::Delay(t), vec![0]);
    c.push(GateKind::Measure, vec![0]);
    c.metadata.insert("benchmark".into(), "idle-t1".into());
    c.metadata.insert("delay_s".into(), format!("{t}"));
    Ok(c)
}

/// Dephasing probe: prepare |+>, idle t/2, refocusing X, idle t/2, rotate
/// back, measure. The midway X cancels static frequency offsets, so the
/// outcome depends on T2 only.
pub fn hahn_echo_circuit(t: f64) -> Result<Circuit> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::InvalidParameter(format!("delay must be >= 0, got {t}")));
    }
    let mut c = Circuit::new(1);
    c.push(GateKind::H, vec![0]);
    c.push(GateKind::Delay(t / 2.0), vec![0]);
    c.push(GateKind::X, vec![0]);
    c.push(GateKind::Delay(t / 2.0), vec![0]);
    c.push(GateKind::H, vec![0]);
    c.push(GateKind::Measure, vec![0]);
    c.metadata.insert("benchmark".into(), "hahn-echo".into());
    c.metadata.insert("delay_s".into(), format!("{t}"));
    Ok(c)
}

/// Several three-qubit GHZ preparations over disjoint neighbouring triplets,
/// combined into one circuit so the whole device is exercised in a single
/// submission.
pub fn ghz_tiled_circuit(topology: &Topology, triplets: &[[usize; 3]]) -> Result<Circuit> {
    if triplets.is_empty() {
        return Err(Error::InvalidTriplet("no triplets given".into()));
    }
    let mut used = std::collections::BTreeSet::new();
    for triplet in triplets {
        for &q in triplet {
            if q >= topology.num_qubits {
                return Err(Error::InvalidTriplet(format!(
                    "qubit {q} outside the {}-qubit topology",
                    topology.num_qubits
                )));
            }
            if !used.insert(q) {
                return Err(Error::InvalidTriplet(format!(
                    "qubit {q} appears in more than one triplet"
                )));
            }
        }
        let [a, b, c] = *triplet;
        if !(topology.has_edge(a, b) && topology.has_edge(b, c)) {
            return Err(Error::InvalidTriplet(format!(
                "({a}, {b}, {c}) is not a connected path"
            )));
        }
    }
    let mut circuit = Circuit::new(topology.num_qubits);
    for &[a, b, c] in triplets {
        circuit.push(GateKind::H, vec![a]);
        circuit.push(GateKind::Cx, vec![a, b]);
        circuit.push(GateKind::Cx, vec![b, c]);
    }
    for triplet in triplets {
        for &q in triplet {
            circuit.push(GateKind::Measure, vec![q]);
        }
    }
    circuit
        .metadata
        .insert("benchmark".into(), "ghz-tiled".into());
    circuit.validate()?;
    Ok(circuit)
}

/// Exact GHZ outcome distribution over 3 measured qubits.
pub fn ghz3_reference_distribution() -> Vec<f64> {
    let mut probs = vec![0.0; 8];
    probs[0] = 0.5;
    probs[7] = 0.5;
    probs
}
