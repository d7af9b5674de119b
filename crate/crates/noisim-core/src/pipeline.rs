//! The full simulation pipeline:
//! substitute -> route -> schedule -> noise pass -> simulate -> sample.
//!
//! Counts are always reported in logical qubit order (bit i of a result is
//! the i-th smallest measured logical qubit), regardless of where routing
//! moved things.

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::counts::{sample_counts, CountsHistogram, ExactDistribution};
use crate::density::{evolve_density_with_limit, measurement_distribution, DEFAULT_DENSITY_QUBIT_LIMIT};
use crate::error::{Error, Result};
use crate::kraus::TphiConvention;
use crate::noise_model::{apply_noise_pass, NoiseModel, NoiseToggles, NoisyProgram};
use crate::schedule::schedule_asap;
use crate::snapshot::DeviceSnapshot;
use crate::trajectory::sample_trajectories;
use crate::transpile::{parse_layout_metadata, route_nearest_neighbor, substitute_to_native, LAYOUT_METADATA_KEY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Density,
    Trajectory,
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub backend: Backend,
    pub shots: u64,
    pub seed: u64,
    pub toggles: NoiseToggles,
    /// Skip the noise pass entirely (noiseless reference run).
    pub ideal: bool,
    pub tphi: TphiConvention,
    /// Logical-to-physical placement; identity when absent.
    pub initial_layout: Option<Vec<usize>>,
    pub density_limit: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            backend: Backend::Density,
            shots: 4096,
            seed: 1,
            toggles: NoiseToggles::all_on(),
            ideal: false,
            tphi: TphiConvention::default(),
            initial_layout: None,
            density_limit: DEFAULT_DENSITY_QUBIT_LIMIT,
        }
    }
}

/// Size figures of the transpiled circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitStats {
    pub num_qubits: usize,
    pub measured_qubits: usize,
    pub two_qubit_gates: usize,
    pub depth: usize,
}

impl CircuitStats {
    pub fn of(circuit: &Circuit) -> Self {
        Self {
            num_qubits: circuit.num_qubits,
            measured_qubits: circuit.measured_qubits().len(),
            two_qubit_gates: circuit.two_qubit_gate_count(),
            depth: circuit.depth(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    /// Post-substitution, post-routing circuit that was actually simulated.
    pub transpiled: Circuit,
    pub stats: CircuitStats,
    pub counts: CountsHistogram,
    /// Exact outcome distribution (density backend only).
    pub exact: Option<ExactDistribution>,
}

/// Restrict a routed circuit and its snapshot to the physical qubits the
/// circuit actually touches. Untouched qubits never entangle with measured
/// ones, so the compacted simulation is exact while the register stays small
/// even on large devices. Returns the compact circuit, the matching snapshot
/// slice and the physical qubit behind each compact index.
fn compact_to_used(
    routed: &Circuit,
    snapshot: &DeviceSnapshot,
) -> Result<(Circuit, DeviceSnapshot, Vec<usize>)> {
    let mut used = std::collections::BTreeSet::new();
    for gate in &routed.instructions {
        used.extend(gate.qubits.iter().copied());
    }
    let physical: Vec<usize> = used.into_iter().collect();
    let index_of: std::collections::BTreeMap<usize, usize> = physical
        .iter()
        .enumerate()
        .map(|(compact, &p)| (p, compact))
        .collect();

    let mut circuit = Circuit::new(physical.len());
    circuit.metadata = routed.metadata.clone();
    for gate in &routed.instructions {
        let qubits = gate.qubits.iter().map(|q| index_of[q]).collect();
        circuit.push(gate.kind.clone(), qubits);
    }

    let compacted = DeviceSnapshot {
        qubits: physical.iter().map(|&p| snapshot.qubits[p].clone()).collect(),
        gates: snapshot
            .gates
            .iter()
            .filter(|g| g.qubits.iter().all(|q| index_of.contains_key(q)))
            .map(|g| crate::snapshot::GateCalibration {
                name: g.name.clone(),
                qubits: g.qubits.iter().map(|q| index_of[q]).collect(),
                fidelity: g.fidelity,
                duration_s: g.duration_s,
            })
            .collect(),
        topology: snapshot
            .topology
            .iter()
            .filter(|(a, b)| index_of.contains_key(a) && index_of.contains_key(b))
            .map(|(a, b)| (index_of[a], index_of[b]))
            .collect(),
        basis: snapshot.basis.clone(),
    };
    Ok((circuit, compacted, physical))
}

/// Run one circuit through the whole stack.
pub fn run_circuit(
    circuit: &Circuit,
    snapshot: &DeviceSnapshot,
    options: &PipelineOptions,
) -> Result<PipelineResult> {
    let measured_logical = circuit.measured_qubits();
    if measured_logical.is_empty() {
        return Err(Error::InvalidCircuit(
            "circuit measures no qubits; nothing to sample".into(),
        ));
    }

    let gateset = snapshot.gateset()?;
    let native = substitute_to_native(circuit, &gateset)?;
    let topology = snapshot.topology_graph()?;
    let identity: Vec<usize> = (0..circuit.num_qubits).collect();
    let layout = options.initial_layout.as_deref().unwrap_or(&identity);
    let routed = route_nearest_neighbor(&native, &topology, layout, &gateset)?;

    let (compact, compact_snapshot, physical_of_compact) = compact_to_used(&routed, snapshot)?;
    let schedule = schedule_asap(&compact, &compact_snapshot)?;

    let program = if options.ideal {
        NoisyProgram::from_circuit_noiseless(&compact)?
    } else {
        let model = NoiseModel::new(compact_snapshot, options.toggles)?.with_tphi(options.tphi);
        apply_noise_pass(&compact, &schedule, &model)?
    };

    // Bit i of every outcome = i-th smallest measured logical qubit; walk
    // logical -> routed physical -> compact index.
    let final_layout = parse_layout_metadata(
        routed
            .metadata
            .get(LAYOUT_METADATA_KEY)
            .expect("router always records the layout"),
    )?;
    let compact_of_physical = |p: usize| {
        physical_of_compact
            .binary_search(&p)
            .expect("measured qubits appear in the circuit")
    };
    let order: Vec<usize> = measured_logical
        .iter()
        .map(|&l| compact_of_physical(final_layout[l]))
        .collect();
    let program = program.with_measure_order(order)?;

    let stats = CircuitStats::of(&routed);
    let (counts, exact) = match options.backend {
        Backend::Density => {
            let rho = evolve_density_with_limit(&program, options.density_limit)?;
            let probs = measurement_distribution(&rho, &program);
            let counts = sample_counts(&probs, measured_logical.len(), options.shots, options.seed)?;
            (
                counts,
                Some(ExactDistribution {
                    num_bits: measured_logical.len(),
                    probs,
                }),
            )
        }
        Backend::Trajectory => (
            sample_trajectories(&program, options.shots, options.seed)?,
            None,
        ),
    };

    Ok(PipelineResult {
        transpiled: routed,
        stats,
        counts,
        exact,
    })
}
