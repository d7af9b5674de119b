//! Stochastic Kraus-trajectory sampling.
//!
//! Each shot evolves a pure state vector: at every channel one Kraus branch
//! is selected (with probability ||K_i psi||^2, or directly by weight when
//! the channel is a mixture of unitaries) and the state renormalised. The
//! estimator is unbiased for the exact backend's distribution and needs only
//! 2^n amplitudes, so it is the path past the density-matrix register cap.
//!
//! Every trajectory draws from its own counter-derived RNG stream, so
//! results are reproducible regardless of how shots are scheduled over
//! threads.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::counts::CountsHistogram;
use crate::error::{Error, Result};
use crate::kernel::{applied_norm_sqr, apply_matrix_to_state, LocalIndexer};
use crate::linalg::{CMat, C64, ZERO};
use crate::noise_model::{NoisyProgram, ProgramOp};

enum TrajOp {
    Unitary {
        indexer: LocalIndexer,
        matrix: CMat,
    },
    /// All Kraus operators are scaled unitaries: branch by weight, no norms.
    MixedUnitary {
        indexer: LocalIndexer,
        cumulative: Vec<f64>,
        unitaries: Vec<CMat>,
    },
    Kraus {
        indexer: LocalIndexer,
        operators: Vec<CMat>,
    },
}

fn plan(program: &NoisyProgram) -> Vec<TrajOp> {
    let n = program.num_qubits;
    program
        .ops
        .iter()
        .map(|op| match op {
            ProgramOp::Unitary { qubits, matrix } => TrajOp::Unitary {
                indexer: LocalIndexer::new(qubits, n),
                matrix: matrix.clone(),
            },
            ProgramOp::Channel { qubits, channel } => {
                let indexer = LocalIndexer::new(qubits, n);
                match channel.mixed_unitary() {
                    Some(parts) => {
                        let mut cumulative = Vec::with_capacity(parts.len());
                        let mut acc = 0.0;
                        let mut unitaries = Vec::with_capacity(parts.len());
                        for (w, u) in parts {
                            acc += w;
                            cumulative.push(acc);
                            unitaries.push(u);
                        }
                        TrajOp::MixedUnitary {
                            indexer,
                            cumulative,
                            unitaries,
                        }
                    }
                    None => TrajOp::Kraus {
                        indexer,
                        operators: channel.operators.clone(),
                    },
                }
            }
        })
        .collect()
}

/// Independent, order-insensitive RNG stream per (seed, trajectory).
fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut state = seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1));
    let mut bytes = [0u8; 32];
    for chunk in bytes.chunks_mut(8) {
        // splitmix64 step
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

fn run_one(program: &NoisyProgram, ops: &[TrajOp], rng: &mut ChaCha8Rng, state: &mut [C64]) -> u64 {
    let dim = state.len();

    // Initial product state with possible preparation flips.
    let mut start = 0usize;
    for (q, &p) in program.init_excited.iter().enumerate() {
        if p > 0.0 && rng.random::<f64>() < p {
            start |= 1 << q;
        }
    }
    state.fill(ZERO);
    state[start] = C64::new(1.0, 0.0);

    for op in ops {
        match op {
            TrajOp::Unitary { indexer, matrix } => {
                apply_matrix_to_state(state, matrix, indexer);
            }
            TrajOp::MixedUnitary {
                indexer,
                cumulative,
                unitaries,
            } => {
                let total = *cumulative.last().expect("nonempty mixture");
                let u: f64 = rng.random::<f64>() * total;
                let pick = cumulative.partition_point(|&c| c < u).min(unitaries.len() - 1);
                apply_matrix_to_state(state, &unitaries[pick], indexer);
            }
            TrajOp::Kraus { indexer, operators } => {
                // Branch norms sum to 1 on a normalised state, so the norms
                // are evaluated lazily: the first branch usually wins. The
                // fallback covers the float-rounding tail (and skips
                // zero-norm branches).
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut chosen: Option<(usize, f64)> = None;
                let mut fallback: Option<(usize, f64)> = None;
                for (i, k) in operators.iter().enumerate() {
                    let w = applied_norm_sqr(state, k, indexer);
                    if w > 0.0 {
                        fallback = Some((i, w));
                    }
                    acc += w;
                    if u < acc && w > 0.0 {
                        chosen = Some((i, w));
                        break;
                    }
                }
                let (pick, norm) =
                    chosen.or(fallback).expect("CPTP channel has a positive branch");
                apply_matrix_to_state(state, &operators[pick], indexer);
                let scale = 1.0 / norm.sqrt();
                for amp in state.iter_mut() {
                    *amp *= scale;
                }
            }
        }
    }

    // Sample a full basis state, project to the measured bits, apply flips.
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut sampled = dim - 1;
    for (i, amp) in state.iter().enumerate() {
        acc += amp.norm_sqr();
        if u < acc {
            sampled = i;
            break;
        }
    }
    let mut outcome = 0u64;
    for (pos, &q) in program.measure_order.iter().enumerate() {
        let mut bit = (sampled >> q) & 1;
        if let Some(confusion) = program.confusion_for(q) {
            // Column b of the confusion matrix is the read-out distribution
            // given the true bit b.
            let flip = if bit == 1 { confusion[0][1] } else { confusion[1][0] };
            if rng.random::<f64>() < flip {
                bit ^= 1;
            }
        }
        outcome |= (bit as u64) << pos;
    }
    outcome
}

/// Sample `shots` trajectories of the program.
pub fn sample_trajectories(program: &NoisyProgram, shots: u64, seed: u64) -> Result<CountsHistogram> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be positive".into()));
    }
    if program.num_qubits >= 30 {
        return Err(Error::RegisterTooLarge {
            qubits: program.num_qubits,
            limit: 29,
        });
    }
    let ops = plan(program);
    let num_bits = program.measure_order.len();
    let dim = 1usize << program.num_qubits;

    let fold_shot = |(mut histogram, mut state): (CountsHistogram, Vec<C64>), shot: u64| {
        let mut rng = trajectory_rng(seed, shot);
        histogram.record(run_one(program, &ops, &mut rng, &mut state));
        (histogram, state)
    };

    #[cfg(feature = "parallel")]
    let histogram = {
        use rayon::prelude::*;
        (0..shots)
            .into_par_iter()
            .fold(|| (CountsHistogram::new(num_bits), vec![ZERO; dim]), fold_shot)
            .map(|(histogram, _)| histogram)
            .reduce(
                || CountsHistogram::new(num_bits),
                |mut a, b| {
                    a.merge(&b);
                    a
                },
            )
    };
    #[cfg(not(feature = "parallel"))]
    let histogram = (0..shots)
        .fold((CountsHistogram::new(num_bits), vec![ZERO; dim]), fold_shot)
        .0;

    Ok(histogram)
}

/// Sequential reference used by the benchmarks; identical results to
/// [`sample_trajectories`] for any thread count.
pub fn sample_trajectories_seq(
    program: &NoisyProgram,
    shots: u64,
    seed: u64,
) -> Result<CountsHistogram> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be positive".into()));
    }
    let ops = plan(program);
    let mut histogram = CountsHistogram::new(program.measure_order.len());
    let mut state = vec![ZERO; 1 << program.num_qubits];
    for shot in 0..shots {
        let mut rng = trajectory_rng(seed, shot);
        histogram.record(run_one(program, &ops, &mut rng, &mut state));
    }
    Ok(histogram)
}
