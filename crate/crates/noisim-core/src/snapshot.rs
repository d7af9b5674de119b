//! Device calibration snapshots.
//!
//! A snapshot freezes everything the noise model needs about one QPU at one
//! point in time: per-qubit decoherence times and SPAM error rates, per-gate
//! fidelities and durations, the topology and the native gateset.

use serde::{Deserialize, Serialize};

use crate::circuit::Topology;
use crate::error::{Error, Result};
use crate::transpile::NativeGateSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitCalibration {
    /// Relaxation time in seconds.
    pub t1_s: f64,
    /// Dephasing time in seconds; must satisfy T2 <= 2 T1.
    pub t2_s: f64,
    /// Probability of reading 1 when the state is |0>.
    pub readout_e0: f64,
    /// Probability of reading 0 when the state is |1>.
    pub readout_e1: f64,
    /// Probability of starting in |1> instead of |0>.
    #[serde(default)]
    pub init_e1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateCalibration {
    pub name: String,
    pub qubits: Vec<usize>,
    pub fidelity: f64,
    pub duration_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceSnapshot {
    pub qubits: Vec<QubitCalibration>,
    pub gates: Vec<GateCalibration>,
    /// Undirected coupling edges.
    pub topology: Vec<(usize, usize)>,
    /// Native gate names (subset of rz, sx, x, cz, ecr).
    pub basis: Vec<String>,
}

/// Parameters for the synthetic snapshot generator. The defaults follow the
/// reference magnitudes of contemporary superconducting hardware: T1 around
/// 1e-5 s, two-qubit fidelity around 0.97, one-percent readout error,
/// gate times around 1e-8 s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub t1_s: f64,
    pub t2_s: f64,
    pub fidelity_1q: f64,
    pub fidelity_2q: f64,
    pub readout_e0: f64,
    pub readout_e1: f64,
    pub init_e1: f64,
    pub duration_1q_s: f64,
    pub duration_2q_s: f64,
    pub basis: Vec<String>,
    pub topology_kind: TopologyKind,
    /// Relative spread applied per qubit/gate (0 = identical parameters).
    pub jitter: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Line,
    Ring,
    Full,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            t1_s: 1e-5,
            t2_s: 1e-5,
            fidelity_1q: 0.9996,
            fidelity_2q: 0.97,
            readout_e0: 0.01,
            readout_e1: 0.01,
            init_e1: 0.0,
            duration_1q_s: 1e-8,
            duration_2q_s: 1e-8,
            basis: vec!["rz".into(), "sx".into(), "x".into(), "ecr".into()],
            topology_kind: TopologyKind::Line,
            jitter: 0.0,
            seed: 7,
        }
    }
}

impl DeviceSnapshot {
    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn validate(&self) -> Result<()> {
        for (i, q) in self.qubits.iter().enumerate() {
            if q.t1_s <= 0.0 || q.t1_s.is_nan() {
                return Err(Error::InvalidParameter(format!("qubit {i}: T1 must be positive")));
            }
            if !(q.t2_s > 0.0 && q.t2_s <= 2.0 * q.t1_s + 1e-18) {
                return Err(Error::InvalidParameter(format!(
                    "qubit {i}: need 0 < T2 <= 2 T1 (T1 = {}, T2 = {})",
                    q.t1_s, q.t2_s
                )));
            }
            for (name, p) in [
                ("readout_e0", q.readout_e0),
                ("readout_e1", q.readout_e1),
                ("init_e1", q.init_e1),
            ] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidParameter(format!(
                        "qubit {i}: {name} = {p} outside [0, 1]"
                    )));
                }
            }
        }
        for g in &self.gates {
            if !(g.fidelity > 0.0 && g.fidelity <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "gate `{}` on {:?}: fidelity {} outside (0, 1]",
                    g.name, g.qubits, g.fidelity
                )));
            }
            if g.duration_s < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "gate `{}` on {:?}: negative duration",
                    g.name, g.qubits
                )));
            }
            for &q in &g.qubits {
                if q >= self.qubits.len() {
                    return Err(Error::InvalidParameter(format!(
                        "gate `{}` references qubit {q} beyond the register",
                        g.name
                    )));
                }
            }
        }
        self.topology_graph()?;
        self.gateset()?;
        Ok(())
    }

    pub fn topology_graph(&self) -> Result<Topology> {
        Topology::new(self.qubits.len(), &self.topology)
    }

    pub fn gateset(&self) -> Result<NativeGateSet> {
        NativeGateSet::new(&self.basis)
    }

    fn find_gate(&self, name: &str, qubits: &[usize]) -> Option<&GateCalibration> {
        self.gates
            .iter()
            .find(|g| g.name == name && g.qubits == qubits)
            .or_else(|| {
                // Unordered fallback for two-qubit entries.
                if qubits.len() == 2 {
                    let rev = [qubits[1], qubits[0]];
                    self.gates.iter().find(|g| g.name == name && g.qubits == rev)
                } else {
                    None
                }
            })
    }

    /// Duration of a native gate; `rz` is virtual (always 0 s).
    pub fn gate_duration(&self, name: &str, qubits: &[usize]) -> Result<f64> {
        if name == "rz" {
            return Ok(0.0);
        }
        self.find_gate(name, qubits)
            .map(|g| g.duration_s)
            .ok_or_else(|| Error::MissingDuration {
                gate: name.to_string(),
                qubits: qubits.to_vec(),
            })
    }

    /// Fidelity of a native gate; `rz` is virtual (always 1).
    pub fn gate_fidelity(&self, name: &str, qubits: &[usize]) -> Result<f64> {
        if name == "rz" {
            return Ok(1.0);
        }
        self.find_gate(name, qubits)
            .map(|g| g.fidelity)
            .ok_or_else(|| Error::MissingCalibration(format!("gate `{name}` on {qubits:?}")))
    }

    pub fn qubit(&self, q: usize) -> Result<&QubitCalibration> {
        self.qubits
            .get(q)
            .ok_or_else(|| Error::MissingCalibration(format!("qubit {q}")))
    }

    /// Generate a uniform synthetic snapshot, optionally jittered per qubit
    /// and gate for spread across the device.
    pub fn synthetic(num_qubits: usize, spec: SyntheticSpec) -> Result<Self> {
        use rand::{RngExt, SeedableRng};
        if num_qubits == 0 {
            return Err(Error::InvalidParameter("snapshot needs at least one qubit".into()));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(spec.seed);
        let mut wobble = |base: f64| -> f64 {
            if spec.jitter == 0.0 {
                base
            } else {
                base * (1.0 + spec.jitter * (2.0 * rng.random::<f64>() - 1.0))
            }
        };
        let mut qubits = Vec::with_capacity(num_qubits);
        for _ in 0..num_qubits {
            let t1 = wobble(spec.t1_s);
            let t2 = wobble(spec.t2_s).min(2.0 * t1);
            qubits.push(QubitCalibration {
                t1_s: t1,
                t2_s: t2,
                readout_e0: wobble(spec.readout_e0).clamp(0.0, 1.0),
                readout_e1: wobble(spec.readout_e1).clamp(0.0, 1.0),
                init_e1: wobble(spec.init_e1).clamp(0.0, 1.0),
            });
        }
        let topology = match spec.topology_kind {
            TopologyKind::Line => Topology::line(num_qubits),
            TopologyKind::Ring => Topology::ring(num_qubits),
            TopologyKind::Full => Topology::full(num_qubits),
        };
        let mut gates = Vec::new();
        let two_qubit_native: Vec<&str> = spec
            .basis
            .iter()
            .filter(|b| *b == "cz" || *b == "ecr")
            .map(|s| s.as_str())
            .collect();
        for q in 0..num_qubits {
            for name in spec.basis.iter().filter(|b| *b == "sx" || *b == "x") {
                gates.push(GateCalibration {
                    name: name.clone(),
                    qubits: vec![q],
                    fidelity: wobble(spec.fidelity_1q).clamp(0.5, 1.0),
                    duration_s: wobble(spec.duration_1q_s).max(0.0),
                });
            }
        }
        for &(a, b) in &topology.edges {
            for name in &two_qubit_native {
                gates.push(GateCalibration {
                    name: name.to_string(),
                    qubits: vec![a, b],
                    fidelity: wobble(spec.fidelity_2q).clamp(0.5, 1.0),
                    duration_s: wobble(spec.duration_2q_s).max(0.0),
                });
            }
        }
        let snapshot = Self {
            qubits,
            gates,
            topology: topology.edges.iter().copied().collect(),
            basis: spec.basis,
        };
        snapshot.validate()?;
        Ok(snapshot)
    }

    /// Scale every error rate by `factor` (gate, readout and init errors;
    /// decoherence times are left untouched). `factor = 1` is the identity,
    /// `factor = 0` the noiseless limit.
    pub fn scale_errors(&self, factor: f64) -> Result<Self> {
        if factor < 0.0 || factor.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be non-negative, got {factor}"
            )));
        }
        let mut out = self.clone();
        for q in &mut out.qubits {
            q.readout_e0 = (q.readout_e0 * factor).clamp(0.0, 1.0);
            q.readout_e1 = (q.readout_e1 * factor).clamp(0.0, 1.0);
            q.init_e1 = (q.init_e1 * factor).clamp(0.0, 1.0);
        }
        for g in &mut out.gates {
            let error = (1.0 - g.fidelity) * factor;
            g.fidelity = (1.0 - error).clamp(0.0, 1.0);
        }
        Ok(out)
    }

    /// Replace every per-qubit and per-gate parameter by its median over the
    /// device (even counts take the mean of the middle two). Gate parameters
    /// are pooled per gate name.
    pub fn median(&self) -> Self {
        let mut out = self.clone();
        let med = |mut v: Vec<f64>| -> f64 {
            v.sort_by(f64::total_cmp);
            let n = v.len();
            if n % 2 == 1 {
                v[n / 2]
            } else {
                0.5 * (v[n / 2 - 1] + v[n / 2])
            }
        };
        let t1 = med(self.qubits.iter().map(|q| q.t1_s).collect());
        let t2 = med(self.qubits.iter().map(|q| q.t2_s).collect()).min(2.0 * t1);
        let e0 = med(self.qubits.iter().map(|q| q.readout_e0).collect());
        let e1 = med(self.qubits.iter().map(|q| q.readout_e1).collect());
        let init = med(self.qubits.iter().map(|q| q.init_e1).collect());
        for q in &mut out.qubits {
            *q = QubitCalibration {
                t1_s: t1,
                t2_s: t2,
                readout_e0: e0,
                readout_e1: e1,
                init_e1: init,
            };
        }
        let names: std::collections::BTreeSet<String> =
            self.gates.iter().map(|g| g.name.clone()).collect();
        for name in names {
            let fid = med(self
                .gates
                .iter()
                .filter(|g| g.name == name)
                .map(|g| g.fidelity)
                .collect());
            let dur = med(self
                .gates
                .iter()
                .filter(|g| g.name == name)
                .map(|g| g.duration_s)
                .collect());
            for g in out.gates.iter_mut().filter(|g| g.name == name) {
                g.fidelity = fid;
                g.duration_s = dur;
            }
        }
        out
    }
}
