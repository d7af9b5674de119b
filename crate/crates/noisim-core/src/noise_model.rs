//! Noise model assembly: from a scheduled circuit to a noisy program.
//!
//! The pass interleaves the noiseless gate unitaries with noise channels
//! according to the calibration snapshot: an init flip on every qubit, a
//! decoherence channel for every idle or delay window, a depolarising
//! channel after every calibrated gate, and a readout confusion matrix on
//! every measurement. Each channel category can be toggled independently.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::kraus::{
    confusion_matrix, depolarizing_channel, idle_channel, init_error_probability, KrausChannel,
    TphiConvention,
};
use crate::linalg::CMat;
use crate::schedule::{Schedule, SlotKind};
use crate::snapshot::DeviceSnapshot;

/// Enable/disable switches for the four channel categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseToggles {
    /// Amplitude damping and pure dephasing during idle/delay windows.
    pub decoherence: bool,
    /// Depolarising channels after calibrated gates.
    pub depolarization: bool,
    /// Readout confusion matrices on measurements.
    pub readout: bool,
    /// Initialisation flips before the first operation.
    pub init: bool,
}

impl NoiseToggles {
    pub fn all_on() -> Self {
        Self {
            decoherence: true,
            depolarization: true,
            readout: true,
            init: true,
        }
    }

    pub fn all_off() -> Self {
        Self {
            decoherence: false,
            depolarization: false,
            readout: false,
            init: false,
        }
    }

    /// Decoherence only; what the idle/echo experiments use.
    pub fn decoherence_only() -> Self {
        Self {
            decoherence: true,
            ..Self::all_off()
        }
    }

    /// Gate and SPAM errors without decoherence; what the QAOA runs use.
    pub fn gates_and_spam() -> Self {
        Self {
            decoherence: false,
            depolarization: true,
            readout: true,
            init: true,
        }
    }
}

impl Default for NoiseToggles {
    fn default() -> Self {
        Self::all_on()
    }
}

/// A calibration snapshot plus channel toggles; the factory for every
/// channel the noise pass inserts.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    pub snapshot: DeviceSnapshot,
    pub toggles: NoiseToggles,
    pub tphi: TphiConvention,
}

impl NoiseModel {
    pub fn new(snapshot: DeviceSnapshot, toggles: NoiseToggles) -> Result<Self> {
        snapshot.validate()?;
        Ok(Self {
            snapshot,
            toggles,
            tphi: TphiConvention::default(),
        })
    }

    pub fn with_tphi(mut self, tphi: TphiConvention) -> Self {
        self.tphi = tphi;
        self
    }

    /// Decoherence channel for an idle window of length `t` on `qubit`.
    pub fn idle(&self, qubit: usize, t: f64) -> Result<KrausChannel> {
        let cal = self.snapshot.qubit(qubit)?;
        idle_channel(cal.t1_s, cal.t2_s, t, self.tphi)
    }

    /// Depolarising channel following a gate, `None` when the gate is exact.
    pub fn after_gate(&self, name: &str, qubits: &[usize]) -> Result<Option<KrausChannel>> {
        let fidelity = self.snapshot.gate_fidelity(name, qubits)?;
        if fidelity >= 1.0 {
            return Ok(None);
        }
        Ok(Some(depolarizing_channel(fidelity, qubits.len())?))
    }

    /// Readout confusion for `qubit`.
    pub fn before_measure(&self, qubit: usize) -> Result<[[f64; 2]; 2]> {
        let cal = self.snapshot.qubit(qubit)?;
        confusion_matrix(cal.readout_e0, cal.readout_e1)
    }

    /// Probability that `qubit` starts in |1>.
    pub fn at_init(&self, qubit: usize) -> Result<f64> {
        init_error_probability(self.snapshot.qubit(qubit)?.init_e1)
    }
}

/// One step of a noisy program.
#[derive(Debug, Clone)]
pub enum ProgramOp {
    /// Noiseless unitary gate.
    Unitary { qubits: Vec<usize>, matrix: CMat },
    /// Kraus channel on the given qubits.
    Channel {
        qubits: Vec<usize>,
        channel: KrausChannel,
    },
}

#[derive(Debug, Clone)]
pub struct MeasureSpec {
    pub qubit: usize,
    pub confusion: Option<[[f64; 2]; 2]>,
}

/// Fully resolved instruction stream ready for either simulation backend.
#[derive(Debug, Clone)]
pub struct NoisyProgram {
    pub num_qubits: usize,
    /// Per-qubit probability of starting in |1>.
    pub init_excited: Vec<f64>,
    pub ops: Vec<ProgramOp>,
    pub measures: Vec<MeasureSpec>,
    /// Measured qubits in bit-position order: entry i supplies bit i (LSB
    /// first) of every result bitstring.
    pub measure_order: Vec<usize>,
}

impl NoisyProgram {
    /// Noiseless program straight from a circuit: gate unitaries only, exact
    /// initialisation and readout.
    pub fn from_circuit_noiseless(circuit: &Circuit) -> Result<Self> {
        circuit.validate()?;
        let mut ops = Vec::new();
        let mut measures = Vec::new();
        for gate in &circuit.instructions {
            match gate.kind {
                GateKind::Delay(_) | GateKind::Barrier => {}
                GateKind::Measure => measures.push(MeasureSpec {
                    qubit: gate.qubits[0],
                    confusion: None,
                }),
                _ => ops.push(ProgramOp::Unitary {
                    qubits: gate.qubits.clone(),
                    matrix: gate.matrix().expect("unitary gate kind"),
                }),
            }
        }
        let mut measure_order: Vec<usize> = measures.iter().map(|m| m.qubit).collect();
        measure_order.sort_unstable();
        Ok(Self {
            num_qubits: circuit.num_qubits,
            init_excited: vec![0.0; circuit.num_qubits],
            ops,
            measures,
            measure_order,
        })
    }

    /// Override the bit order of results; `order` must be a permutation of
    /// the measured qubits.
    pub fn with_measure_order(mut self, order: Vec<usize>) -> Result<Self> {
        let mut expected: Vec<usize> = self.measures.iter().map(|m| m.qubit).collect();
        expected.sort_unstable();
        let mut given = order.clone();
        given.sort_unstable();
        if expected != given {
            return Err(Error::InvalidParameter(
                "measure order must be a permutation of the measured qubits".into(),
            ));
        }
        self.measure_order = order;
        Ok(self)
    }

    pub fn confusion_for(&self, qubit: usize) -> Option<[[f64; 2]; 2]> {
        self.measures
            .iter()
            .find(|m| m.qubit == qubit)
            .and_then(|m| m.confusion)
    }
}

/// Interleave noise channels into a scheduled circuit.
///
/// Idle and delay windows become decoherence channels (but idle time after a
/// qubit's measurement is discarded: its outcome is already classical).
/// Gates are followed by their depolarising channel, measurements carry the
/// confusion matrix, and init flips come first.
pub fn apply_noise_pass(
    circuit: &Circuit,
    schedule: &Schedule,
    model: &NoiseModel,
) -> Result<NoisyProgram> {
    if schedule.per_qubit.len() != circuit.num_qubits {
        return Err(Error::InvalidParameter(
            "schedule does not correspond to the circuit".into(),
        ));
    }

    // Deterministic global time order: gates before idles at equal start
    // times, both keyed by position for stability.
    #[derive(PartialEq)]
    struct Event {
        start: f64,
        order: usize,
        what: EventKind,
    }
    #[derive(PartialEq)]
    enum EventKind {
        Gate(usize),
        Idle { qubit: usize, duration: f64 },
    }

    let mut events = Vec::new();
    let mut seen_gate = vec![false; circuit.instructions.len()];
    for (qubit, slots) in schedule.per_qubit.iter().enumerate() {
        for slot in slots {
            match slot.kind {
                SlotKind::Instruction(index) => {
                    if !seen_gate[index] {
                        seen_gate[index] = true;
                        events.push(Event {
                            start: slot.start,
                            order: index,
                            what: EventKind::Gate(index),
                        });
                    }
                }
                SlotKind::Idle => {
                    // Skip windows after this qubit's measurement.
                    if let Some(t_meas) = schedule.measure_time[qubit] {
                        if slot.start >= t_meas {
                            continue;
                        }
                    }
                    events.push(Event {
                        start: slot.start,
                        order: circuit.instructions.len() + qubit,
                        what: EventKind::Idle {
                            qubit,
                            duration: slot.end - slot.start,
                        },
                    });
                }
            }
        }
    }
    events.sort_by(|a, b| {
        a.start
            .total_cmp(&b.start)
            .then_with(|| a.order.cmp(&b.order))
    });

    let mut init_excited = vec![0.0; circuit.num_qubits];
    if model.toggles.init {
        for (q, slot) in init_excited.iter_mut().enumerate() {
            *slot = model.at_init(q)?;
        }
    }

    let mut ops = Vec::new();
    let mut measures = Vec::new();
    for event in events {
        match event.what {
            EventKind::Gate(index) => {
                let gate = &circuit.instructions[index];
                match gate.kind {
                    GateKind::Barrier => {}
                    GateKind::Measure => {
                        let confusion = if model.toggles.readout {
                            Some(model.before_measure(gate.qubits[0])?)
                        } else {
                            None
                        };
                        measures.push(MeasureSpec {
                            qubit: gate.qubits[0],
                            confusion,
                        });
                    }
                    GateKind::Delay(t) => {
                        if model.toggles.decoherence && t > 0.0 {
                            ops.push(ProgramOp::Channel {
                                qubits: gate.qubits.clone(),
                                channel: model.idle(gate.qubits[0], t)?,
                            });
                        }
                    }
                    _ => {
                        ops.push(ProgramOp::Unitary {
                            qubits: gate.qubits.clone(),
                            matrix: gate.matrix().expect("unitary gate kind"),
                        });
                        if model.toggles.depolarization {
                            if let Some(channel) =
                                model.after_gate(gate.kind.name(), &gate.qubits)?
                            {
                                ops.push(ProgramOp::Channel {
                                    qubits: gate.qubits.clone(),
                                    channel,
                                });
                            }
                        }
                    }
                }
            }
            EventKind::Idle { qubit, duration } => {
                if model.toggles.decoherence && duration > 0.0 {
                    ops.push(ProgramOp::Channel {
                        qubits: vec![qubit],
                        channel: model.idle(qubit, duration)?,
                    });
                }
            }
        }
    }

    let mut measure_order: Vec<usize> = measures.iter().map(|m| m.qubit).collect();
    measure_order.sort_unstable();
    Ok(NoisyProgram {
        num_qubits: circuit.num_qubits,
        init_excited,
        ops,
        measures,
        measure_order,
    })
}
