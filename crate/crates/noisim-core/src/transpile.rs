//! Native-gateset substitution and nearest-neighbor SWAP routing.
//!
//! Substitution is a fixed rewrite table with no optimisation; every rule is
//! checked against the dense unitary oracle in the tests, so the particular
//! variant chosen below is free as long as it is correct up to global phase.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::circuit::{Circuit, Gate, GateKind, Topology};
use crate::error::{Error, Result};

/// The gate names a device may declare as native. `Measure`, `Delay` and
/// `Barrier` always pass through.
#[derive(Debug, Clone, PartialEq)]
pub struct NativeGateSet {
    names: BTreeSet<String>,
}

impl NativeGateSet {
    pub fn new<I: IntoIterator<Item = S>, S: AsRef<str>>(names: I) -> Result<Self> {
        let mut set = BTreeSet::new();
        for name in names {
            let name = name.as_ref().to_ascii_lowercase();
            match name.as_str() {
                "rz" | "sx" | "x" | "cz" | "ecr" => {
                    set.insert(name);
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "`{other}` cannot be declared native (allowed: rz, sx, x, cz, ecr)"
                    )))
                }
            }
        }
        Ok(Self { names: set })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.contains(name)
    }

    pub fn names(&self) -> Vec<String> {
        self.names.iter().cloned().collect()
    }

    fn accepts(&self, kind: &GateKind) -> bool {
        match kind {
            GateKind::Delay(_) | GateKind::Measure | GateKind::Barrier => true,
            other => self.contains(other.name()),
        }
    }
}

impl Default for NativeGateSet {
    /// IBM-style basis: rz, sx, x, ecr.
    fn default() -> Self {
        Self::new(["rz", "sx", "x", "ecr"]).expect("default basis is valid")
    }
}

/// Rewrite every instruction into the native gateset. Output is unitarily
/// equivalent to the input up to global phase; no cancellation or
/// commutation analysis is attempted.
pub fn substitute_to_native(circuit: &Circuit, gateset: &NativeGateSet) -> Result<Circuit> {
    circuit.validate()?;
    let mut out = Circuit::new(circuit.num_qubits);
    out.metadata = circuit.metadata.clone();
    for gate in &circuit.instructions {
        lower_gate(gate, gateset, &mut out.instructions, 0)?;
    }
    Ok(out)
}

// Recursion depth is bounded: every rule strictly reduces towards the native
// set, and the two-qubit rules only recurse through cx -> {cz | ecr}.
const MAX_LOWER_DEPTH: usize = 16;

fn lower_gate(
    gate: &Gate,
    gateset: &NativeGateSet,
    out: &mut Vec<Gate>,
    depth: usize,
) -> Result<()> {
    if gateset.accepts(&gate.kind) {
        out.push(gate.clone());
        return Ok(());
    }
    if depth >= MAX_LOWER_DEPTH {
        return Err(Error::UnknownDecomposition {
            gate: gate.kind.name().to_string(),
            gateset: gateset.names(),
        });
    }
    let unknown = || Error::UnknownDecomposition {
        gate: gate.kind.name().to_string(),
        gateset: gateset.names(),
    };
    let q = gate.qubits.clone();
    let steps: Vec<Gate> = match gate.kind {
        // H = Rz(pi/2) Sx Rz(pi/2), up to the global phase e^{-i pi/4}.
        GateKind::H => vec![
            Gate::new(GateKind::Rz(FRAC_PI_2), q.clone()),
            Gate::new(GateKind::Sx, q.clone()),
            Gate::new(GateKind::Rz(FRAC_PI_2), q.clone()),
        ],
        // Rx(t) = H Rz(t) H, with the H's expanded on the next pass.
        GateKind::Rx(theta) => vec![
            Gate::new(GateKind::H, q.clone()),
            Gate::new(GateKind::Rz(theta), q.clone()),
            Gate::new(GateKind::H, q.clone()),
        ],
        // X = Sx Sx when x itself is not native.
        GateKind::X => vec![
            Gate::new(GateKind::Sx, q.clone()),
            Gate::new(GateKind::Sx, q.clone()),
        ],
        GateKind::Cx => {
            if gateset.contains("cz") {
                // CX(c, t) = H_t CZ H_t.
                vec![
                    Gate::new(GateKind::H, vec![q[1]]),
                    Gate::new(GateKind::Cz, q.clone()),
                    Gate::new(GateKind::H, vec![q[1]]),
                ]
            } else if gateset.contains("ecr") {
                // CX(c, t) = e^{-i pi/4} (Rz(-pi/2)_c Rx(-pi/2)_t)
                //            (H_c H_t) X_t ECR(c, t) (H_c H_t).
                vec![
                    Gate::new(GateKind::H, vec![q[0]]),
                    Gate::new(GateKind::H, vec![q[1]]),
                    Gate::new(GateKind::Ecr, q.clone()),
                    Gate::new(GateKind::X, vec![q[1]]),
                    Gate::new(GateKind::H, vec![q[0]]),
                    Gate::new(GateKind::H, vec![q[1]]),
                    Gate::new(GateKind::Rz(-FRAC_PI_2), vec![q[0]]),
                    Gate::new(GateKind::Rx(-FRAC_PI_2), vec![q[1]]),
                ]
            } else {
                return Err(unknown());
            }
        }
        GateKind::Cz => {
            if gateset.contains("ecr") {
                // CZ(a, b) = H_b CX(a, b) H_b.
                vec![
                    Gate::new(GateKind::H, vec![q[1]]),
                    Gate::new(GateKind::Cx, q.clone()),
                    Gate::new(GateKind::H, vec![q[1]]),
                ]
            } else {
                return Err(unknown());
            }
        }
        GateKind::Ecr => {
            if gateset.contains("cz") {
                // ECR(c, t) = X_t H_c Rzz(pi/2) H_c.
                vec![
                    Gate::new(GateKind::H, vec![q[0]]),
                    Gate::new(GateKind::Rzz(FRAC_PI_2), q.clone()),
                    Gate::new(GateKind::H, vec![q[0]]),
                    Gate::new(GateKind::X, vec![q[1]]),
                ]
            } else {
                return Err(unknown());
            }
        }
        // Rzz(t) = CX Rz(t)_b CX.
        GateKind::Rzz(theta) => vec![
            Gate::new(GateKind::Cx, q.clone()),
            Gate::new(GateKind::Rz(theta), vec![q[1]]),
            Gate::new(GateKind::Cx, q.clone()),
        ],
        // CX ladder onto the last qubit, Rz(theta), reverse ladder.
        GateKind::PhaseGadget(theta) => {
            let mut steps = Vec::new();
            for w in q.windows(2) {
                steps.push(Gate::new(GateKind::Cx, vec![w[0], w[1]]));
            }
            steps.push(Gate::new(GateKind::Rz(theta), vec![*q.last().expect("nonempty")]));
            for w in q.windows(2).rev() {
                steps.push(Gate::new(GateKind::Cx, vec![w[0], w[1]]));
            }
            steps
        }
        GateKind::Swap => vec![
            Gate::new(GateKind::Cx, vec![q[0], q[1]]),
            Gate::new(GateKind::Cx, vec![q[1], q[0]]),
            Gate::new(GateKind::Cx, vec![q[0], q[1]]),
        ],
        GateKind::Rz(theta) => {
            // Rz is virtual on every supported device; a basis without it is
            // rejected unless the angle is trivial.
            if theta.rem_euclid(2.0 * PI) == 0.0 {
                Vec::new()
            } else {
                return Err(unknown());
            }
        }
        GateKind::Sx | GateKind::Delay(_) | GateKind::Measure | GateKind::Barrier => {
            return Err(unknown())
        }
    };
    for step in &steps {
        lower_gate(step, gateset, out, depth + 1)?;
    }
    Ok(())
}

/// Metadata key holding the final logical-to-physical layout after routing,
/// as a comma-separated list indexed by logical qubit.
pub const LAYOUT_METADATA_KEY: &str = "final_layout";

pub fn parse_layout_metadata(value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("bad layout entry `{s}`")))
        })
        .collect()
}

/// Greedy shortest-path SWAP insertion.
///
/// Walks the instruction list with a live logical-to-physical map; whenever a
/// two-qubit gate acts on non-adjacent physical qubits, the first operand is
/// swapped along a BFS shortest path until the pair shares an edge. Inserted
/// SWAPs are decomposed into the native gateset. The final layout is recorded
/// in the circuit metadata so measurement results can be reported in logical
/// order.
pub fn route_nearest_neighbor(
    circuit: &Circuit,
    topology: &Topology,
    initial_layout: &[usize],
    gateset: &NativeGateSet,
) -> Result<Circuit> {
    circuit.validate()?;
    if initial_layout.len() != circuit.num_qubits {
        return Err(Error::InvalidParameter(format!(
            "layout covers {} qubits, circuit has {}",
            initial_layout.len(),
            circuit.num_qubits
        )));
    }
    if circuit.num_qubits > topology.num_qubits {
        return Err(Error::InvalidParameter(format!(
            "circuit needs {} qubits, topology has {}",
            circuit.num_qubits, topology.num_qubits
        )));
    }
    let mut seen = BTreeSet::new();
    for &p in initial_layout {
        if p >= topology.num_qubits || !seen.insert(p) {
            return Err(Error::InvalidParameter(
                "initial layout must be injective into the physical qubits".into(),
            ));
        }
    }

    // layout[l] = physical position of logical qubit l.
    let mut layout = initial_layout.to_vec();
    let mut out = Circuit::new(topology.num_qubits);
    out.metadata = circuit.metadata.clone();

    let swap_till_adjacent =
        |layout: &mut Vec<usize>, out: &mut Circuit, a: usize, b: usize| -> Result<()> {
            loop {
                let (pa, pb) = (layout[a], layout[b]);
                if topology.has_edge(pa, pb) {
                    return Ok(());
                }
                let path = topology
                    .shortest_path(pa, pb)
                    .ok_or(Error::DisconnectedTopology(pa, pb))?;
                // Move the first operand one step along the path.
                let next = path[1];
                let swap = Gate::new(GateKind::Swap, vec![pa, next]);
                lower_gate(&swap, gateset, &mut out.instructions, 0)?;
                for slot in layout.iter_mut() {
                    if *slot == pa {
                        *slot = next;
                    } else if *slot == next {
                        *slot = pa;
                    }
                }
            }
        };

    for gate in &circuit.instructions {
        match gate.qubits.len() {
            2 => {
                let (a, b) = (gate.qubits[0], gate.qubits[1]);
                swap_till_adjacent(&mut layout, &mut out, a, b)?;
                out.push(gate.kind.clone(), vec![layout[a], layout[b]]);
            }
            _ => {
                let mapped = gate.qubits.iter().map(|&q| layout[q]).collect();
                out.push(gate.kind.clone(), mapped);
            }
        }
    }

    let layout_str: Vec<String> = layout.iter().map(|p| p.to_string()).collect();
    out.metadata
        .insert(LAYOUT_METADATA_KEY.into(), layout_str.join(","));
    Ok(out)
}
