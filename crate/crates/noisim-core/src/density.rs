//! Exact density-matrix evolution.
//!
//! The state is a dense 2^n x 2^n complex matrix; unitaries and channels are
//! applied through their superoperators over strided sub-blocks. Memory is
//! the limiting factor, so the register size is capped (default 12 qubits,
//! about 0.27 GiB for the state plus one scratch buffer).

use crate::error::{Error, Result};
use crate::kernel::{superoperator, LocalIndexer};
use crate::linalg::{hermitian_eigenvalues, CMat, C64, ZERO};
use crate::noise_model::{NoisyProgram, ProgramOp};

/// Default register cap for the density backend.
pub const DEFAULT_DENSITY_QUBIT_LIMIT: usize = 12;

/// 2^n x 2^n density matrix, row-major.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub num_qubits: usize,
    pub data: Vec<C64>,
}

impl DensityMatrix {
    /// Product state with per-qubit excited-state probabilities.
    pub fn product_state(excited: &[f64]) -> Self {
        let n = excited.len();
        let dim = 1usize << n;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            let mut p = 1.0;
            for (q, &e) in excited.iter().enumerate() {
                p *= if (i >> q) & 1 == 1 { e } else { 1.0 - e };
            }
            data[i * dim + i] = C64::new(p, 0.0);
        }
        Self { num_qubits: n, data }
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn trace(&self) -> f64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i].re).sum()
    }

    /// tr(rho^2); 1 for pure states.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i].re).collect()
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                let d = (self.data[i * dim + j] - self.data[j * dim + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Smallest eigenvalue; feasible for small registers only.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = CMat {
            dim: self.dim(),
            data: self.data.clone(),
        };
        hermitian_eigenvalues(&m)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Run a noisy program on the exact backend.
pub fn evolve_density(program: &NoisyProgram) -> Result<DensityMatrix> {
    evolve_density_with_limit(program, DEFAULT_DENSITY_QUBIT_LIMIT)
}

pub fn evolve_density_with_limit(program: &NoisyProgram, limit: usize) -> Result<DensityMatrix> {
    let n = program.num_qubits;
    if n > limit {
        return Err(Error::RegisterTooLarge { qubits: n, limit });
    }
    let dim = 1usize << n;
    let mut state = DensityMatrix::product_state(&program.init_excited);
    let mut scratch = vec![ZERO; dim * dim];

    for op in &program.ops {
        let (qubits, kraus): (&[usize], Vec<&CMat>) = match op {
            ProgramOp::Unitary { qubits, matrix } => (qubits, vec![matrix]),
            ProgramOp::Channel { qubits, channel } => {
                (qubits, channel.operators.iter().collect())
            }
        };
        let owned: Vec<CMat> = kraus.into_iter().cloned().collect();
        let superop = superoperator(&owned);
        let indexer = LocalIndexer::new(qubits, n);
        #[cfg(feature = "parallel")]
        crate::kernel::apply_superop_par(&state.data, &mut scratch, &superop, &indexer);
        #[cfg(not(feature = "parallel"))]
        crate::kernel::apply_superop_seq(&state.data, &mut scratch, &superop, &indexer);
        std::mem::swap(&mut state.data, &mut scratch);

        let trace = state.trace();
        if (trace - 1.0).abs() > 1e-8 {
            return Err(Error::NumericalBreakdown(format!(
                "state trace drifted to {trace}"
            )));
        }
    }
    Ok(state)
}

/// Exact outcome distribution over the measured qubits.
///
/// Bit i of the result indices comes from `program.measure_order[i]`; the
/// per-qubit confusion matrices act on the classical marginal, never on the
/// quantum state.
pub fn measurement_distribution(state: &DensityMatrix, program: &NoisyProgram) -> Vec<f64> {
    let measured = &program.measure_order;
    let m = measured.len();
    let mut probs = vec![0.0f64; 1 << m];
    for (index, p) in state.diagonal().into_iter().enumerate() {
        let mut out = 0usize;
        for (pos, &q) in measured.iter().enumerate() {
            if (index >> q) & 1 == 1 {
                out |= 1 << pos;
            }
        }
        probs[out] += p;
    }
    for (pos, &q) in measured.iter().enumerate() {
        if let Some(confusion) = program.confusion_for(q) {
            apply_confusion_axis(&mut probs, pos, &confusion);
        }
    }
    probs
}

/// Apply a 2x2 column-stochastic matrix along one bit axis of a classical
/// distribution.
pub fn apply_confusion_axis(probs: &mut [f64], bit: usize, confusion: &[[f64; 2]; 2]) {
    let stride = 1usize << bit;
    let mut i = 0;
    while i < probs.len() {
        for j in i..i + stride {
            let p0 = probs[j];
            let p1 = probs[j + stride];
            probs[j] = confusion[0][0] * p0 + confusion[0][1] * p1;
            probs[j + stride] = confusion[1][0] * p0 + confusion[1][1] * p1;
        }
        i += 2 * stride;
    }
}
