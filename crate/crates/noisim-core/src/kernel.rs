//! Strided index kernels shared by both simulation backends.
//!
//! A k-qubit operator touches groups of 2^k amplitudes (or 2^k x 2^k
//! sub-blocks of the density matrix) whose indices differ only in the gate's
//! bit positions. `LocalIndexer` precomputes the bit scattering; the apply
//! functions come in `_seq` and `_par` flavours, with the parallel ones
//! splitting the work over rayon. Both orders of summation are identical, so
//! the two flavours produce bit-identical results.

use crate::linalg::{CMat, C64, ZERO};

/// Bit bookkeeping for a gate on `qubits` inside an n-qubit register.
/// Local indices follow the gate-matrix convention: `qubits[0]` is the most
/// significant local bit; globally, qubit 0 is the LSB.
#[derive(Debug, Clone)]
pub struct LocalIndexer {
    /// Global offset contributed by each local index.
    pub offsets: Vec<usize>,
    /// Gate bit positions, ascending (for free-index scattering).
    sorted_bits: Vec<usize>,
    pub num_qubits: usize,
    pub local_dim: usize,
}

impl LocalIndexer {
    pub fn new(qubits: &[usize], num_qubits: usize) -> Self {
        let k = qubits.len();
        let local_dim = 1usize << k;
        let mut offsets = vec![0usize; local_dim];
        for (local, offset) in offsets.iter_mut().enumerate() {
            for (pos, &q) in qubits.iter().enumerate() {
                if (local >> (k - 1 - pos)) & 1 == 1 {
                    *offset |= 1 << q;
                }
            }
        }
        let mut sorted_bits = qubits.to_vec();
        sorted_bits.sort_unstable();
        Self {
            offsets,
            sorted_bits,
            num_qubits,
            local_dim,
        }
    }

    /// Number of amplitude groups (free-index combinations).
    pub fn group_count(&self) -> usize {
        1usize << (self.num_qubits - self.sorted_bits.len())
    }

    /// Scatter a free index over the non-gate bit positions.
    #[inline]
    pub fn group_base(&self, free: usize) -> usize {
        let mut idx = free;
        for &bit in &self.sorted_bits {
            let low = idx & ((1 << bit) - 1);
            idx = ((idx >> bit) << (bit + 1)) | low;
        }
        idx
    }

    /// Local row/column index of a global index, recovered by testing each
    /// single-bit contribution.
    #[inline]
    pub fn local_of(&self, global: usize) -> usize {
        let k = self.sorted_bits.len();
        let mut local = 0usize;
        for pos in 0..k {
            let single = self.offsets[1 << (k - 1 - pos)];
            if global & single != 0 {
                local |= 1 << (k - 1 - pos);
            }
        }
        local
    }

    /// Global index with the gate bits of `global` cleared.
    #[inline]
    pub fn clear_gate_bits(&self, global: usize) -> usize {
        let mut idx = global;
        for &bit in &self.sorted_bits {
            idx &= !(1usize << bit);
        }
        idx
    }
}

/// Superoperator of a Kraus set: S[(r' d + c'), (r d + c)] =
/// sum_k K[r', r] conj(K[c', c]); a unitary is the single-element case.
pub fn superoperator(kraus: &[CMat]) -> CMat {
    let d = kraus[0].dim;
    let mut s = CMat::zeros(d * d);
    for k in kraus {
        for rp in 0..d {
            for r in 0..d {
                let left = k.at(rp, r);
                if left == ZERO {
                    continue;
                }
                for cp in 0..d {
                    for c in 0..d {
                        let right = k.at(cp, c).conj();
                        if right == ZERO {
                            continue;
                        }
                        let row = rp * d + cp;
                        let col = r * d + c;
                        s.data[row * s.dim + col] += left * right;
                    }
                }
            }
        }
    }
    s
}

/// One output row of the density-matrix update; shared by the sequential and
/// parallel drivers so their arithmetic is identical.
#[inline]
fn superop_row(
    data: &[C64],
    out_row: &mut [C64],
    superop: &CMat,
    indexer: &LocalIndexer,
    row: usize,
) {
    let dim = out_row.len();
    let d = indexer.local_dim;
    let local_row = indexer.local_of(row);
    let row_base = indexer.clear_gate_bits(row);
    let row_indices: Vec<usize> = (0..d).map(|a| row_base | indexer.offsets[a]).collect();
    for free in 0..indexer.group_count() {
        let col_base = indexer.group_base(free);
        for local_col in 0..d {
            let mut acc = ZERO;
            let srow = local_row * d + local_col;
            for a in 0..d {
                let from_row = &data[row_indices[a] * dim..row_indices[a] * dim + dim];
                for b in 0..d {
                    let coeff = superop.at(srow, a * d + b);
                    if coeff == ZERO {
                        continue;
                    }
                    acc += coeff * from_row[col_base | indexer.offsets[b]];
                }
            }
            out_row[col_base | indexer.offsets[local_col]] = acc;
        }
    }
}

/// Apply a channel superoperator to a (row-major) density matrix, writing
/// into `out`.
pub fn apply_superop_seq(data: &[C64], out: &mut [C64], superop: &CMat, indexer: &LocalIndexer) {
    let dim = 1usize << indexer.num_qubits;
    for (row, out_row) in out.chunks_mut(dim).enumerate() {
        superop_row(data, out_row, superop, indexer, row);
    }
}

#[cfg(feature = "parallel")]
pub fn apply_superop_par(data: &[C64], out: &mut [C64], superop: &CMat, indexer: &LocalIndexer) {
    use rayon::prelude::*;
    let dim = 1usize << indexer.num_qubits;
    out.par_chunks_mut(dim).enumerate().for_each(|(row, out_row)| {
        superop_row(data, out_row, superop, indexer, row);
    });
}

/// Apply a local matrix to a state vector, in place. Gate arities here are
/// tiny (d <= 4 after transpilation), so the scratch lives on the stack;
/// larger gadgets take the heap path.
pub fn apply_matrix_to_state(state: &mut [C64], matrix: &CMat, indexer: &LocalIndexer) {
    let d = indexer.local_dim;
    if d <= 4 {
        let mut scratch = [ZERO; 4];
        for free in 0..indexer.group_count() {
            let base = indexer.group_base(free);
            for a in 0..d {
                scratch[a] = state[base | indexer.offsets[a]];
            }
            for a in 0..d {
                let row = &matrix.data[a * d..(a + 1) * d];
                let mut acc = ZERO;
                for b in 0..d {
                    acc += row[b] * scratch[b];
                }
                state[base | indexer.offsets[a]] = acc;
            }
        }
    } else {
        let mut scratch = vec![ZERO; d];
        for free in 0..indexer.group_count() {
            let base = indexer.group_base(free);
            for (a, slot) in scratch.iter_mut().enumerate() {
                *slot = state[base | indexer.offsets[a]];
            }
            for a in 0..d {
                let row = &matrix.data[a * d..(a + 1) * d];
                let mut acc = ZERO;
                for (b, amp) in scratch.iter().enumerate() {
                    acc += row[b] * amp;
                }
                state[base | indexer.offsets[a]] = acc;
            }
        }
    }
}

/// Squared norm of (M applied to the state), without materialising it.
pub fn applied_norm_sqr(state: &[C64], matrix: &CMat, indexer: &LocalIndexer) -> f64 {
    let d = indexer.local_dim;
    let mut total = 0.0;
    for free in 0..indexer.group_count() {
        let base = indexer.group_base(free);
        for a in 0..d {
            let row = &matrix.data[a * d..(a + 1) * d];
            let mut acc = ZERO;
            for b in 0..d {
                acc += row[b] * state[base | indexer.offsets[b]];
            }
            total += acc.norm_sqr();
        }
    }
    total
}

/// Sum `f` over `0..count` in fixed-size blocks: block partials are
/// independent, and the final fold runs in index order, so the result does
/// not depend on the number of worker threads (and matches the sequential
/// build bit for bit).
pub fn block_sum<F: Fn(u64) -> f64 + Sync>(count: u64, f: F) -> f64 {
    const BLOCK: u64 = 1 << 14;
    let blocks = count.div_ceil(BLOCK);
    let partial = |blk: u64| -> f64 {
        let lo = blk * BLOCK;
        let hi = (lo + BLOCK).min(count);
        let mut acc = 0.0;
        for i in lo..hi {
            acc += f(i);
        }
        acc
    };
    #[cfg(feature = "parallel")]
    let partials: Vec<f64> = {
        use rayon::prelude::*;
        (0..blocks).into_par_iter().map(partial).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<f64> = (0..blocks).map(partial).collect();
    partials.into_iter().sum()
}

/// Sequential reference with the same blocking as [`block_sum`]; identical
/// result bit for bit.
pub fn block_sum_seq<F: Fn(u64) -> f64>(count: u64, f: F) -> f64 {
    const BLOCK: u64 = 1 << 14;
    let blocks = count.div_ceil(BLOCK);
    (0..blocks)
        .map(|blk| {
            let lo = blk * BLOCK;
            let hi = (lo + BLOCK).min(count);
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i);
            }
            acc
        })
        .sum()
}

/// Two sums in one pass, same blocking discipline as [`block_sum`].
pub fn block_sum2<F: Fn(u64) -> (f64, f64) + Sync>(count: u64, f: F) -> (f64, f64) {
    const BLOCK: u64 = 1 << 14;
    let blocks = count.div_ceil(BLOCK);
    let partial = |blk: u64| -> (f64, f64) {
        let lo = blk * BLOCK;
        let hi = (lo + BLOCK).min(count);
        let mut acc = (0.0, 0.0);
        for i in lo..hi {
            let (a, b) = f(i);
            acc.0 += a;
            acc.1 += b;
        }
        acc
    };
    #[cfg(feature = "parallel")]
    let partials: Vec<(f64, f64)> = {
        use rayon::prelude::*;
        (0..blocks).into_par_iter().map(partial).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<(f64, f64)> = (0..blocks).map(partial).collect();
    partials
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{embed_unitary, Gate, GateKind};

    #[test]
    fn indexer_round_trips_local_indices() {
        let indexer = LocalIndexer::new(&[2, 0], 4);
        for global in 0..16usize {
            let local = indexer.local_of(global);
            let rebuilt = indexer.clear_gate_bits(global) | indexer.offsets[local];
            assert_eq!(rebuilt, global);
        }
        assert_eq!(indexer.group_count(), 4);
    }

    #[test]
    fn state_kernel_matches_dense_embedding() {
        let gate = Gate::new(GateKind::Ecr, vec![2, 0]);
        let local = gate.matrix().unwrap();
        let dense = embed_unitary(&local, &[2, 0], 3);
        let indexer = LocalIndexer::new(&[2, 0], 3);
        let mut state: Vec<C64> = (0..8)
            .map(|i| C64::new(1.0 + i as f64, 0.5 - i as f64))
            .collect();
        let expected = dense.matvec(&state);
        apply_matrix_to_state(&mut state, &local, &indexer);
        for (a, b) in state.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn density_kernel_matches_dense_conjugation() {
        let gate = Gate::new(GateKind::Cx, vec![1, 2]);
        let local = gate.matrix().unwrap();
        let dense = embed_unitary(&local, &[1, 2], 3);
        // Arbitrary Hermitian matrix.
        let mut rho = CMat::zeros(8);
        for i in 0..8 {
            for j in 0..8 {
                let v = C64::new((i * 8 + j) as f64, (i as f64) - (j as f64));
                rho.set(i, j, v);
            }
        }
        let expected = dense.matmul(&rho).matmul(&dense.dagger());
        let indexer = LocalIndexer::new(&[1, 2], 3);
        let superop = superoperator(std::slice::from_ref(&local));
        let mut out = vec![ZERO; 64];
        apply_superop_seq(&rho.data, &mut out, &superop, &indexer);
        for (a, b) in out.iter().zip(&expected.data) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_sequential_kernels_agree_exactly() {
        let gate = Gate::new(GateKind::Ecr, vec![3, 1]);
        let local = gate.matrix().unwrap();
        let indexer = LocalIndexer::new(&[3, 1], 4);
        let superop = superoperator(std::slice::from_ref(&local));
        let rho: Vec<C64> = (0..256)
            .map(|i| C64::new((i % 17) as f64, (i % 5) as f64))
            .collect();
        let mut seq = vec![ZERO; 256];
        let mut par = vec![ZERO; 256];
        apply_superop_seq(&rho, &mut seq, &superop, &indexer);
        apply_superop_par(&rho, &mut par, &superop, &indexer);
        assert_eq!(seq, par);
    }

    #[test]
    fn block_sum_matches_plain_sum() {
        let plain: f64 = (0..100_000u64).map(|i| (i as f64).sqrt()).sum();
        let blocked = block_sum(100_000, |i| (i as f64).sqrt());
        assert!((plain - blocked).abs() < 1e-6 * plain.abs());
        let (a, b) = block_sum2(1000, |i| (i as f64, 2.0 * i as f64));
        assert!((a - 499_500.0).abs() < 1e-9);
        assert!((b - 999_000.0).abs() < 1e-9);
    }

    #[test]
    fn block_sum_is_bit_stable_across_flavours() {
        // The ordered block reduction makes the parallel sum bit-identical
        // to the sequential one, not merely close.
        let f = |i: u64| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        let par = block_sum(250_000, f);
        let seq = block_sum_seq(250_000, f);
        assert_eq!(par.to_bits(), seq.to_bits());
    }
}
