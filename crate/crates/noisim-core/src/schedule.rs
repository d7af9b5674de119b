//! As-soon-as-possible timeline construction.
//!
//! The schedule is what the noise pass reads to find idle windows: qubits
//! decohere during the gaps, not during gates, so every gap is materialised
//! as an explicit `Idle` interval.

use crate::circuit::{Circuit, GateKind};
use crate::error::Result;
use crate::snapshot::DeviceSnapshot;

/// What occupies a slot on a qubit's timeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlotKind {
    /// Index into the circuit's instruction list.
    Instruction(usize),
    Idle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slot {
    pub start: f64,
    pub end: f64,
    pub kind: SlotKind,
}

/// Per-qubit timelines; every qubit's slots are contiguous from t = 0 to its
/// last instruction, padded with a trailing idle up to the makespan.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub per_qubit: Vec<Vec<Slot>>,
    pub makespan: f64,
    /// Time at which each qubit is measured, if it is.
    pub measure_time: Vec<Option<f64>>,
}

/// Schedule every instruction as early as possible.
///
/// Multi-qubit gates start once all their qubits are free; the waiting qubits
/// accumulate idle time. Barriers synchronise their qubits (all of them when
/// the barrier names none) at zero duration. Measures and barriers take zero
/// time, delays take their parameter, and everything else is looked up in the
/// snapshot.
pub fn schedule_asap(circuit: &Circuit, snapshot: &DeviceSnapshot) -> Result<Schedule> {
    circuit.validate()?;
    let n = circuit.num_qubits;
    let mut ready = vec![0.0f64; n];
    let mut per_qubit: Vec<Vec<Slot>> = vec![Vec::new(); n];
    let mut measure_time = vec![None; n];

    for (index, gate) in circuit.instructions.iter().enumerate() {
        let qubits: Vec<usize> = if gate.qubits.is_empty() {
            (0..n).collect()
        } else {
            gate.qubits.clone()
        };
        let duration = match gate.kind {
            GateKind::Delay(t) => t,
            GateKind::Measure | GateKind::Barrier => 0.0,
            _ => snapshot.gate_duration(gate.kind.name(), &gate.qubits)?,
        };
        let start = qubits.iter().map(|&q| ready[q]).fold(0.0, f64::max);
        if matches!(gate.kind, GateKind::Barrier) {
            // Synchronisation point only; the gap up to it becomes idle.
            for &q in &qubits {
                push_idle(&mut per_qubit[q], ready[q], start);
                ready[q] = start;
            }
            continue;
        }
        for &q in &qubits {
            push_idle(&mut per_qubit[q], ready[q], start);
            per_qubit[q].push(Slot {
                start,
                end: start + duration,
                kind: SlotKind::Instruction(index),
            });
            ready[q] = start + duration;
        }
        if matches!(gate.kind, GateKind::Measure) {
            measure_time[gate.qubits[0]] = Some(start);
        }
    }

    let makespan = ready.iter().copied().fold(0.0, f64::max);
    for q in 0..n {
        push_idle(&mut per_qubit[q], ready[q], makespan);
    }
    Ok(Schedule {
        per_qubit,
        makespan,
        measure_time,
    })
}

fn push_idle(slots: &mut Vec<Slot>, from: f64, to: f64) {
    if to > from {
        slots.push(Slot {
            start: from,
            end: to,
            kind: SlotKind::Idle,
        });
    }
}
