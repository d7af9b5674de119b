//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered list of gate/delay/measure instructions on a
//! fixed register. Bit order everywhere in this crate: qubit 0 is the least
//! significant bit of a basis-state index, and bitstring keys render the
//! index MSB-first (so qubit 0 is the rightmost character).

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::collections::VecDeque;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, ONE, ZERO};

/// Gate kinds understood by the transpiler and the simulators.
///
/// `Delay` carries its duration in seconds; every other duration is resolved
/// from the device snapshot at schedule time.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    X,
    Sx,
    Rz(f64),
    H,
    Cx,
    Cz,
    Ecr,
    Rx(f64),
    Rzz(f64),
    /// exp(-i theta/2 * Z x Z x ... x Z) over the gate's qubit set.
    PhaseGadget(f64),
    Swap,
    Delay(f64),
    Measure,
    Barrier,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Sx => "sx",
            GateKind::Rz(_) => "rz",
            GateKind::H => "h",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Ecr => "ecr",
            GateKind::Rx(_) => "rx",
            GateKind::Rzz(_) => "rzz",
            GateKind::PhaseGadget(_) => "phase_gadget",
            GateKind::Swap => "swap",
            GateKind::Delay(_) => "delay",
            GateKind::Measure => "measure",
            GateKind::Barrier => "barrier",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            GateKind::Rz(t)
            | GateKind::Rx(t)
            | GateKind::Rzz(t)
            | GateKind::PhaseGadget(t)
            | GateKind::Delay(t) => vec![*t],
            _ => Vec::new(),
        }
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(
            self,
            GateKind::Delay(_) | GateKind::Measure | GateKind::Barrier
        )
    }
}

/// One instruction: a gate kind plus the (distinct, ordered) qubits it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Self {
        Self { kind, qubits }
    }

    /// Dense unitary in the gate's local basis, `qubits[0]` being the most
    /// significant bit of the local index. `None` for non-unitary kinds.
    pub fn matrix(&self) -> Option<CMat> {
        let h = FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let m = match &self.kind {
            GateKind::X => CMat::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
            GateKind::Sx => CMat::from_rows(&[
                &[c(0.5, 0.5), c(0.5, -0.5)],
                &[c(0.5, -0.5), c(0.5, 0.5)],
            ]),
            GateKind::H => CMat::from_rows(&[&[c(h, 0.0), c(h, 0.0)], &[c(h, 0.0), c(-h, 0.0)]]),
            GateKind::Rz(t) => {
                let e = Complex64::from_polar(1.0, -t / 2.0);
                CMat::from_rows(&[&[e, ZERO], &[ZERO, e.conj()]])
            }
            GateKind::Rx(t) => {
                let (co, si) = ((t / 2.0).cos(), (t / 2.0).sin());
                CMat::from_rows(&[&[c(co, 0.0), c(0.0, -si)], &[c(0.0, -si), c(co, 0.0)]])
            }
            GateKind::Cx => CMat::from_rows(&[
                &[ONE, ZERO, ZERO, ZERO],
                &[ZERO, ONE, ZERO, ZERO],
                &[ZERO, ZERO, ZERO, ONE],
                &[ZERO, ZERO, ONE, ZERO],
            ]),
            GateKind::Cz => {
                let mut m = CMat::identity(4);
                m.set(3, 3, -ONE);
                m
            }
            // (1/sqrt 2)(I x X - X x Y) on (control, target).
            GateKind::Ecr => CMat::from_rows(&[
                &[ZERO, c(h, 0.0), ZERO, c(0.0, h)],
                &[c(h, 0.0), ZERO, c(0.0, -h), ZERO],
                &[ZERO, c(0.0, h), ZERO, c(h, 0.0)],
                &[c(0.0, -h), ZERO, c(h, 0.0), ZERO],
            ]),
            GateKind::Rzz(t) => {
                let e = Complex64::from_polar(1.0, -t / 2.0);
                let mut m = CMat::zeros(4);
                m.set(0, 0, e);
                m.set(1, 1, e.conj());
                m.set(2, 2, e.conj());
                m.set(3, 3, e);
                m
            }
            GateKind::PhaseGadget(t) => {
                let dim = 1usize << self.qubits.len();
                let mut m = CMat::zeros(dim);
                for idx in 0..dim {
                    // Parity of the local bits sets the sign of the phase.
                    let sign = if (idx.count_ones() & 1) == 0 { -1.0 } else { 1.0 };
                    m.set(idx, idx, Complex64::from_polar(1.0, sign * t / 2.0));
                }
                m
            }
            GateKind::Swap => CMat::from_rows(&[
                &[ONE, ZERO, ZERO, ZERO],
                &[ZERO, ZERO, ONE, ZERO],
                &[ZERO, ONE, ZERO, ZERO],
                &[ZERO, ZERO, ZERO, ONE],
            ]),
            GateKind::Delay(_) | GateKind::Measure | GateKind::Barrier => return None,
        };
        Some(m)
    }

    fn expected_arity(&self) -> Option<usize> {
        match self.kind {
            GateKind::X | GateKind::Sx | GateKind::Rz(_) | GateKind::H | GateKind::Rx(_) => Some(1),
            GateKind::Cx | GateKind::Cz | GateKind::Ecr | GateKind::Rzz(_) | GateKind::Swap => {
                Some(2)
            }
            GateKind::Delay(_) | GateKind::Measure => Some(1),
            GateKind::PhaseGadget(_) | GateKind::Barrier => None,
        }
    }
}

/// Device connectivity: undirected edges over physical qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub num_qubits: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl Topology {
    pub fn new(num_qubits: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut edges = BTreeSet::new();
        for &(a, b) in pairs {
            if a == b {
                return Err(Error::InvalidParameter(format!(
                    "topology self-loop on qubit {a}"
                )));
            }
            if a >= num_qubits || b >= num_qubits {
                return Err(Error::InvalidParameter(format!(
                    "topology edge ({a}, {b}) references a qubit >= {num_qubits}"
                )));
            }
            edges.insert((a.min(b), a.max(b)));
        }
        Ok(Self { num_qubits, edges })
    }

    pub fn line(num_qubits: usize) -> Self {
        let pairs: Vec<_> = (1..num_qubits).map(|i| (i - 1, i)).collect();
        Self::new(num_qubits, &pairs).expect("line topology is always valid")
    }

    pub fn ring(num_qubits: usize) -> Self {
        let mut pairs: Vec<_> = (1..num_qubits).map(|i| (i - 1, i)).collect();
        if num_qubits > 2 {
            pairs.push((num_qubits - 1, 0));
        }
        Self::new(num_qubits, &pairs).expect("ring topology is always valid")
    }

    pub fn full(num_qubits: usize) -> Self {
        let mut pairs = Vec::new();
        for a in 0..num_qubits {
            for b in (a + 1)..num_qubits {
                pairs.push((a, b));
            }
        }
        Self::new(num_qubits, &pairs).expect("full topology is always valid")
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == q {
                    Some(b)
                } else if b == q {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// BFS shortest path (inclusive of both endpoints).
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        if from == to {
            return Some(vec![from]);
        }
        let mut prev = vec![usize::MAX; self.num_qubits];
        let mut queue = VecDeque::from([from]);
        prev[from] = from;
        while let Some(cur) = queue.pop_front() {
            for next in self.neighbors(cur) {
                if prev[next] == usize::MAX {
                    prev[next] = cur;
                    if next == to {
                        let mut path = vec![to];
                        let mut at = to;
                        while at != from {
                            at = prev[at];
                            path.push(at);
                        }
                        path.reverse();
                        return Some(path);
                    }
                    queue.push_back(next);
                }
            }
        }
        None
    }
}

/// Ordered instruction list on a fixed register, plus free-form metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub instructions: Vec<Gate>,
    pub metadata: BTreeMap<String, String>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            instructions: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, kind: GateKind, qubits: Vec<usize>) {
        self.instructions.push(Gate::new(kind, qubits));
    }

    /// Check the structural invariants: valid and distinct qubit indices,
    /// finite parameters, non-negative delays, at most one measure per qubit
    /// and nothing after it on that qubit.
    pub fn validate(&self) -> Result<()> {
        let mut measured = vec![false; self.num_qubits];
        for (pos, gate) in self.instructions.iter().enumerate() {
            if let Some(arity) = gate.expected_arity() {
                if gate.qubits.len() != arity {
                    return Err(Error::InvalidCircuit(format!(
                        "instruction {pos}: `{}` expects {arity} qubit(s), got {}",
                        gate.kind.name(),
                        gate.qubits.len()
                    )));
                }
            }
            if gate.qubits.is_empty() && !matches!(gate.kind, GateKind::Barrier) {
                return Err(Error::InvalidCircuit(format!(
                    "instruction {pos}: `{}` needs at least one qubit",
                    gate.kind.name()
                )));
            }
            let mut seen = BTreeSet::new();
            for &q in &gate.qubits {
                if q >= self.num_qubits {
                    return Err(Error::InvalidCircuit(format!(
                        "instruction {pos}: qubit {q} out of range (register has {})",
                        self.num_qubits
                    )));
                }
                if !seen.insert(q) {
                    return Err(Error::InvalidCircuit(format!(
                        "instruction {pos}: duplicate qubit {q}"
                    )));
                }
                if measured[q] && !matches!(gate.kind, GateKind::Barrier) {
                    return Err(Error::InvalidCircuit(format!(
                        "instruction {pos}: qubit {q} already measured"
                    )));
                }
            }
            for &t in gate.kind.params().iter() {
                if !t.is_finite() {
                    return Err(Error::InvalidCircuit(format!(
                        "instruction {pos}: non-finite parameter"
                    )));
                }
            }
            if let GateKind::Delay(t) = gate.kind {
                if t < 0.0 {
                    return Err(Error::InvalidCircuit(format!(
                        "instruction {pos}: negative delay {t}"
                    )));
                }
            }
            if matches!(gate.kind, GateKind::Measure) {
                measured[gate.qubits[0]] = true;
            }
        }
        Ok(())
    }

    /// Qubits carrying a `Measure`, in ascending index order. Bit position i
    /// of a result bitstring belongs to the i-th entry of this list.
    pub fn measured_qubits(&self) -> Vec<usize> {
        let mut qs: Vec<usize> = self
            .instructions
            .iter()
            .filter(|g| matches!(g.kind, GateKind::Measure))
            .map(|g| g.qubits[0])
            .collect();
        qs.sort_unstable();
        qs
    }

    /// Unitary gates acting on exactly two qubits.
    pub fn two_qubit_gate_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|g| g.kind.is_unitary() && g.qubits.len() == 2)
            .count()
    }

    /// Longest instruction chain over the qubit dependency DAG. Barriers
    /// synchronize but do not count as a layer.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.num_qubits];
        for gate in &self.instructions {
            let qubits: Vec<usize> = if gate.qubits.is_empty() {
                (0..self.num_qubits).collect()
            } else {
                gate.qubits.clone()
            };
            let base = qubits.iter().map(|&q| level[q]).max().unwrap_or(0);
            let next = if matches!(gate.kind, GateKind::Barrier) {
                base
            } else {
                base + 1
            };
            for q in qubits {
                level[q] = next;
            }
        }
        level.into_iter().max().unwrap_or(0)
    }

    /// Dense unitary of the whole circuit (delays and barriers act as
    /// identity; measures are rejected). Intended for the small-register
    /// equivalence oracles.
    pub fn unitary(&self) -> Result<CMat> {
        let dim = 1usize << self.num_qubits;
        let mut acc = CMat::identity(dim);
        for gate in &self.instructions {
            match gate.kind {
                GateKind::Delay(_) | GateKind::Barrier => continue,
                GateKind::Measure => {
                    return Err(Error::InvalidCircuit(
                        "circuit with measurements has no unitary".into(),
                    ))
                }
                _ => {}
            }
            let local = gate.matrix().expect("unitary kind has a matrix");
            let embedded = embed_unitary(&local, &gate.qubits, self.num_qubits);
            acc = embedded.matmul(&acc);
        }
        Ok(acc)
    }
}

/// Embed a local gate unitary (with `qubits[0]` the most significant local
/// bit) into the full 2^n register, qubit 0 being the global LSB.
pub fn embed_unitary(local: &CMat, qubits: &[usize], num_qubits: usize) -> CMat {
    let k = qubits.len();
    assert_eq!(local.dim, 1 << k);
    let dim = 1usize << num_qubits;
    let mut out = CMat::zeros(dim);
    let local_index = |global: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in qubits.iter().enumerate() {
            if (global >> q) & 1 == 1 {
                idx |= 1 << (k - 1 - pos);
            }
        }
        idx
    };
    // Global indices with all gate-qubit bits cleared enumerate the fixed
    // (spectator) part; local indices enumerate the rest.
    for row in 0..dim {
        let lrow = local_index(row);
        let mut base = row;
        for &q in qubits {
            base &= !(1usize << q);
        }
        for lcol in 0..(1usize << k) {
            let v = local.at(lrow, lcol);
            if v == ZERO {
                continue;
            }
            let mut col = base;
            for (pos, &q) in qubits.iter().enumerate() {
                if (lcol >> (k - 1 - pos)) & 1 == 1 {
                    col |= 1 << q;
                }
            }
            out.set(row, col, v);
        }
    }
    out
}

/// Render a basis-state index as an MSB-first bitstring of `width` characters
/// (qubit 0 ends up rightmost).
pub fn index_to_bitstring(index: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|b| if (index >> b) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Inverse of [`index_to_bitstring`].
pub fn bitstring_to_index(bits: &str) -> Result<u64> {
    let mut idx = 0u64;
    for ch in bits.chars() {
        idx = (idx << 1)
            | match ch {
                '0' => 0,
                '1' => 1,
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "bitstring contains `{ch}`"
                    )))
                }
            };
    }
    Ok(idx)
}

// --- JSON form -------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GateJson {
    gate: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    params: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    num_qubits: usize,
    instructions: Vec<GateJson>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
}

impl Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let instructions = self
            .instructions
            .iter()
            .map(|g| GateJson {
                gate: g.kind.name().to_string(),
                qubits: g.qubits.clone(),
                params: g.kind.params(),
            })
            .collect();
        CircuitJson {
            num_qubits: self.num_qubits,
            instructions,
            metadata: self.metadata.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw = CircuitJson::deserialize(deserializer)?;
        let mut instructions = Vec::with_capacity(raw.instructions.len());
        for g in raw.instructions {
            let theta = || -> std::result::Result<f64, D::Error> {
                g.params
                    .first()
                    .copied()
                    .ok_or_else(|| DeError::custom(format!("gate `{}` needs a parameter", g.gate)))
            };
            let kind = match g.gate.as_str() {
                "x" => GateKind::X,
                "sx" => GateKind::Sx,
                "rz" => GateKind::Rz(theta()?),
                "h" => GateKind::H,
                "cx" | "cnot" => GateKind::Cx,
                "cz" => GateKind::Cz,
                "ecr" => GateKind::Ecr,
                "rx" => GateKind::Rx(theta()?),
                "rzz" => GateKind::Rzz(theta()?),
                "phase_gadget" => GateKind::PhaseGadget(theta()?),
                "swap" => GateKind::Swap,
                "delay" => GateKind::Delay(theta()?),
                "measure" => GateKind::Measure,
                "barrier" => GateKind::Barrier,
                other => return Err(DeError::custom(format!("unknown gate `{other}`"))),
            };
            instructions.push(Gate::new(kind, g.qubits));
        }
        Ok(Circuit {
            num_qubits: raw.num_qubits,
            instructions,
            metadata: raw.metadata,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sx_squared_is_x() {
        let sx = Gate::new(GateKind::Sx, vec![0]).matrix().unwrap();
        let x = Gate::new(GateKind::X, vec![0]).matrix().unwrap();
        assert!(sx.matmul(&sx).max_abs_diff(&x) < 1e-15);
    }

    #[test]
    fn ecr_is_unitary() {
        let ecr = Gate::new(GateKind::Ecr, vec![0, 1]).matrix().unwrap();
        let prod = ecr.dagger().matmul(&ecr);
        assert!(prod.max_abs_diff(&CMat::identity(4)) < 1e-15);
    }

    #[test]
    fn phase_gadget_on_one_qubit_matches_rz() {
        let pg = Gate::new(GateKind::PhaseGadget(0.73), vec![0]).matrix().unwrap();
        let rz = Gate::new(GateKind::Rz(0.73), vec![0]).matrix().unwrap();
        assert!(pg.max_abs_diff(&rz) < 1e-15);
    }

    #[test]
    fn phase_gadget_on_two_qubits_matches_rzz() {
        let pg = Gate::new(GateKind::PhaseGadget(1.1), vec![0, 1]).matrix().unwrap();
        let rzz = Gate::new(GateKind::Rzz(1.1), vec![0, 1]).matrix().unwrap();
        assert!(pg.max_abs_diff(&rzz) < 1e-15);
    }

    #[test]
    fn embedding_respects_qubit_order() {
        // CX with control q1, target q0 on a 2-qubit register: flips bit 0
        // when bit 1 is set.
        let cx = Gate::new(GateKind::Cx, vec![1, 0]).matrix().unwrap();
        let full = embed_unitary(&cx, &[1, 0], 2);
        // |10> (index 2) -> |11> (index 3)
        assert_eq!(full.at(3, 2), ONE);
        assert_eq!(full.at(2, 2), ZERO);
        // |01> (index 1) stays
        assert_eq!(full.at(1, 1), ONE);
    }

    #[test]
    fn validate_rejects_gate_after_measure() {
        let mut c = Circuit::new(1);
        c.push(GateKind::Measure, vec![0]);
        c.push(GateKind::X, vec![0]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn validate_rejects_duplicate_qubits() {
        let mut c = Circuit::new(2);
        c.push(GateKind::Cx, vec![1, 1]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn depth_counts_parallel_layers_once() {
        let mut c = Circuit::new(3);
        c.push(GateKind::H, vec![0]);
        c.push(GateKind::H, vec![1]);
        c.push(GateKind::Cx, vec![0, 1]);
        c.push(GateKind::X, vec![2]);
        assert_eq!(c.depth(), 2);
        assert_eq!(c.two_qubit_gate_count(), 1);
    }

    #[test]
    fn json_round_trip() {
        let mut c = Circuit::new(2);
        c.push(GateKind::Rz(std::f64::consts::FRAC_PI_2), vec![0]);
        c.push(GateKind::Ecr, vec![0, 1]);
        c.push(GateKind::Delay(1e-7), vec![1]);
        c.push(GateKind::Measure, vec![0]);
        c.metadata.insert("problem".into(), "demo".into());
        let text = serde_json::to_string(&c).unwrap();
        let back: Circuit = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn bitstring_round_trip() {
        assert_eq!(index_to_bitstring(5, 4), "0101");
        assert_eq!(bitstring_to_index("0101").unwrap(), 5);
    }

    #[test]
    fn shortest_path_on_line() {
        let t = Topology::line(5);
        assert_eq!(t.shortest_path(0, 3).unwrap(), vec![0, 1, 2, 3]);
        let disconnected = Topology::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(disconnected.shortest_path(0, 3).is_none());
    }
}
