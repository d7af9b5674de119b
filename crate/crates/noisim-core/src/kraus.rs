//! Kraus channels built from calibration parameters.
//!
//! Every channel maps rho -> sum_i K_i rho K_i^dag and satisfies the
//! completeness relation sum_i K_i^dag K_i = I. Construction is where the
//! calibration numbers (T1, T2, gate fidelities, SPAM rates) are turned into
//! operator sets; application lives in the simulator kernels.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64, ONE, ZERO};

/// How the pure dephasing time is derived from (T1, T2).
///
/// `HalfT1` uses 1/T_phi = 1/T2 - 1/(2 T1), which makes the composition of
/// amplitude damping and pure dephasing decay off-diagonals exactly as
/// e^{-t/T2}. `FullT1` uses 1/T_phi = 1/T2 - 1/T1 and gives a slightly faster
/// combined off-diagonal decay; it is kept available as a configuration
/// switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TphiConvention {
    #[default]
    HalfT1,
    FullT1,
}

impl TphiConvention {
    fn inverse_tphi(self, t1: f64, t2: f64) -> f64 {
        match self {
            TphiConvention::HalfT1 => 1.0 / t2 - 1.0 / (2.0 * t1),
            TphiConvention::FullT1 => 1.0 / t2 - 1.0 / t1,
        }
    }
}

/// A completely positive trace-preserving map given by its Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    pub operators: Vec<CMat>,
    /// Number of qubits the channel acts on (1 or 2).
    pub arity: usize,
}

impl KrausChannel {
    pub fn new(operators: Vec<CMat>, arity: usize) -> Self {
        let dim = 1usize << arity;
        debug_assert!(operators.iter().all(|k| k.dim == dim));
        Self { operators, arity }
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub fn identity(arity: usize) -> Self {
        Self::new(vec![CMat::identity(1 << arity)], arity)
    }

    /// Largest entry of |sum_i K_i^dag K_i - I|.
    pub fn completeness_defect(&self) -> f64 {
        let dim = self.dim();
        let mut acc = CMat::zeros(dim);
        for k in &self.operators {
            acc = acc.add(&k.dagger().matmul(k));
        }
        acc.max_abs_diff(&CMat::identity(dim))
    }

    pub fn is_identity(&self) -> bool {
        self.operators.len() == 1
            && self.operators[0].max_abs_diff(&CMat::identity(self.dim())) == 0.0
    }

    /// Drop operators that are numerically zero.
    fn pruned(mut self) -> Self {
        self.operators
            .retain(|k| k.data.iter().any(|v| v.norm_sqr() > 1e-32));
        if self.operators.is_empty() {
            self.operators.push(CMat::zeros(self.dim()));
        }
        self
    }

    /// Apply to a small dense density matrix: sum_i K_i rho K_i^dag.
    pub fn apply(&self, rho: &CMat) -> CMat {
        let mut out = CMat::zeros(rho.dim);
        for k in &self.operators {
            out = out.add(&k.matmul(rho).matmul(&k.dagger()));
        }
        out
    }

    /// Sequential composition: `self` after `first` (operator products
    /// K_self * K_first in every combination).
    pub fn after(&self, first: &KrausChannel) -> KrausChannel {
        assert_eq!(self.arity, first.arity);
        let mut ops = Vec::with_capacity(self.operators.len() * first.operators.len());
        for a in &self.operators {
            for b in &first.operators {
                ops.push(a.matmul(b));
            }
        }
        KrausChannel::new(ops, self.arity).pruned()
    }

    /// When every Kraus operator is a scaled unitary (K_i = sqrt(w_i) U_i),
    /// return the (w_i, U_i) decomposition. Pauli channels are of this form,
    /// which lets the trajectory sampler pick a branch without computing
    /// state norms.
    pub fn mixed_unitary(&self) -> Option<Vec<(f64, CMat)>> {
        let dim = self.dim();
        let identity = CMat::identity(dim);
        let mut parts = Vec::with_capacity(self.operators.len());
        for k in &self.operators {
            let m = k.dagger().matmul(k);
            let w = m.trace().re / dim as f64;
            if w <= 1e-30 {
                continue;
            }
            if m.max_abs_diff(&identity.scale(Complex64::new(w, 0.0))) > 1e-12 {
                return None;
            }
            parts.push((w, k.scale(Complex64::new(1.0 / w.sqrt(), 0.0))));
        }
        Some(parts)
    }

    /// Average gate fidelity against the identity,
    /// F_avg = (d F_pro + 1) / (d + 1) with F_pro = sum_i |tr K_i|^2 / d^2.
    pub fn average_gate_fidelity(&self) -> f64 {
        let d = self.dim() as f64;
        let f_pro: f64 = self
            .operators
            .iter()
            .map(|k| k.trace().norm_sqr())
            .sum::<f64>()
            / (d * d);
        (d * f_pro + 1.0) / (d + 1.0)
    }
}

fn check_time(name: &str, t: f64) -> Result<()> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{name} must be a finite non-negative time, got {t}"
        )));
    }
    Ok(())
}

/// Relaxation towards |0> over a window of length `t`:
/// E0 = |0><0| + e^{-t/(2 T1)} |1><1|,  E1 = sqrt(1 - e^{-t/T1}) |0><1|.
pub fn amplitude_damping_channel(t1: f64, t: f64) -> Result<KrausChannel> {
    if t1 <= 0.0 || t1.is_nan() {
        return Err(Error::InvalidParameter(format!("T1 must be positive, got {t1}")));
    }
    check_time("idle time", t)?;
    // sqrt(e^{-t/T1}) written as e^{-t/(2 T1)}, and 1 - e^{-t/T1} through
    // expm1: both stay accurate when the exponents are extreme.
    let survive = (-t / (2.0 * t1)).exp();
    let decayed = -(-t / t1).exp_m1();
    let e0 = CMat::from_rows(&[&[ONE, ZERO], &[ZERO, C64::new(survive, 0.0)]]);
    let e1 = CMat::from_rows(&[&[ZERO, C64::new(decayed.sqrt(), 0.0)], &[ZERO, ZERO]]);
    Ok(KrausChannel::new(vec![e0, e1], 1).pruned())
}

/// Pure dephasing over a window of length `t`:
/// E0 = |0><0| + sqrt(1 - p) |1><1|,  E1 = sqrt(p) |1><1|,
/// with p = 1 - e^{-2 t / T_phi}.
pub fn dephasing_channel(
    t1: f64,
    t2: f64,
    t: f64,
    convention: TphiConvention,
) -> Result<KrausChannel> {
    if !(t1 > 0.0 && t2 > 0.0) || t2 > 2.0 * t1 + 1e-18 {
        return Err(Error::InvalidParameter(format!(
            "need 0 < T2 <= 2 T1, got T1 = {t1}, T2 = {t2}"
        )));
    }
    check_time("idle time", t)?;
    let inv_tphi = convention.inverse_tphi(t1, t2);
    if inv_tphi < -1e-18 {
        return Err(Error::InvalidParameter(format!(
            "T_phi is undefined for T1 = {t1}, T2 = {t2} under {convention:?}"
        )));
    }
    // sqrt(1 - p) = e^{-t/T_phi} computed directly so strong dephasing does
    // not flush the surviving coherence to zero.
    let survive = (-t * inv_tphi.max(0.0)).exp();
    let p = -(-2.0 * t * inv_tphi.max(0.0)).exp_m1();
    let e0 = CMat::from_rows(&[&[ONE, ZERO], &[ZERO, C64::new(survive, 0.0)]]);
    let e1 = CMat::from_rows(&[&[ZERO, ZERO], &[ZERO, C64::new(p.sqrt(), 0.0)]]);
    Ok(KrausChannel::new(vec![e0, e1], 1).pruned())
}

/// Decoherence over an idle window: pure dephasing composed with amplitude
/// damping (the two commute). The combined map sends
/// [[a, b], [b*, 1-a]] to [[(a-1) e^{-t/T1} + 1, b e^{-t/T2}], ...]
/// under the default T_phi convention.
pub fn idle_channel(t1: f64, t2: f64, t: f64, convention: TphiConvention) -> Result<KrausChannel> {
    let ad = amplitude_damping_channel(t1, t)?;
    let deph = dephasing_channel(t1, t2, t, convention)?;
    Ok(ad.after(&deph))
}

/// Closed form of the combined decoherence map on one qubit, used as the
/// entrywise oracle for [`idle_channel`].
pub fn decoherence_closed_form(a: f64, b: C64, t1: f64, t2: f64, t: f64) -> CMat {
    let d1 = (-t / t1).exp();
    let d2 = (-t / t2).exp();
    CMat::from_rows(&[
        &[C64::new((a - 1.0) * d1 + 1.0, 0.0), b * d2],
        &[b.conj() * d2, C64::new((1.0 - a) * d1, 0.0)],
    ])
}

/// sigma_0 .. sigma_3 = I, X, Y, Z.
pub fn pauli(i: usize) -> CMat {
    let im = Complex64::new(0.0, 1.0);
    match i {
        0 => CMat::identity(2),
        1 => CMat::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
        2 => CMat::from_rows(&[&[ZERO, -im], &[im, ZERO]]),
        3 => CMat::from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]]),
        _ => panic!("pauli index out of range"),
    }
}

fn single_qubit_pauli_ops(p: f64) -> Vec<CMat> {
    let mut ops = Vec::with_capacity(4);
    ops.push(pauli(0).scale(C64::new((1.0 - p).sqrt(), 0.0)));
    for i in 1..4 {
        ops.push(pauli(i).scale(C64::new((p / 3.0).sqrt(), 0.0)));
    }
    ops
}

/// Depolarising channel whose average gate fidelity equals the calibrated
/// `fidelity`.
///
/// Arity 1: K0 = sqrt(1-p) I, K_i = sqrt(p/3) sigma_i with p = 3(1-F)/2
/// (from F_avg = 1 - 2p/3). Arity 2: the tensor set {K_i (x) K_j} with the
/// per-qubit weight p solved from (4 (1-p)^2 + 1) / 5 = F.
pub fn depolarizing_channel(fidelity: f64, arity: usize) -> Result<KrausChannel> {
    if !(fidelity > 0.0 && fidelity <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fidelity {fidelity} outside (0, 1]"
        )));
    }
    let p = match arity {
        1 => 1.5 * (1.0 - fidelity),
        2 => {
            let sq = (5.0 * fidelity - 1.0) / 4.0;
            if sq < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "two-qubit fidelity {fidelity} below the representable range"
                )));
            }
            1.0 - sq.sqrt()
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "depolarising arity must be 1 or 2, got {other}"
            )))
        }
    };
    if !(0.0..=0.75).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "fidelity {fidelity} maps to Pauli weight {p} outside [0, 3/4]"
        )));
    }
    let single = single_qubit_pauli_ops(p);
    let ops = match arity {
        1 => single,
        _ => {
            let mut ops = Vec::with_capacity(16);
            for a in &single {
                for b in &single {
                    ops.push(a.kron(b));
                }
            }
            ops
        }
    };
    Ok(KrausChannel::new(ops, arity).pruned())
}

/// Column-stochastic readout confusion matrix
/// [[1-e0, e1], [e0, 1-e1]]: column j holds the read-out distribution given
/// the true outcome j.
pub fn confusion_matrix(e0: f64, e1: f64) -> Result<[[f64; 2]; 2]> {
    for (name, p) in [("e0", e0), ("e1", e1)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "readout {name} = {p} outside [0, 1]"
            )));
        }
    }
    Ok([[1.0 - e0, e1], [e0, 1.0 - e1]])
}

/// Initial single-qubit state under a classical preparation flip:
/// (1 - e_init) |0><0| + e_init |1><1|.
pub fn init_error_probability(e_init1: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&e_init1) {
        return Err(Error::InvalidParameter(format!(
            "init error {e_init1} outside [0, 1]"
        )));
    }
    Ok(e_init1)
}

#[cfg(test)]
mod tests {
    use super::*;

    const T1: f64 = 1e-5;

    #[test]
    fn amplitude_damping_at_zero_time_is_identity() {
        let ch = amplitude_damping_channel(T1, 0.0).unwrap();
        assert!(ch.is_identity());
    }

    #[test]
    fn amplitude_damping_decays_excited_population() {
        let ch = amplitude_damping_channel(1e-5, 1e-5).unwrap();
        assert!(ch.completeness_defect() < 1e-15);
        let excited = CMat::from_rows(&[&[ZERO, ZERO], &[ZERO, ONE]]);
        let out = ch.apply(&excited);
        let e = (-1.0f64).exp();
        assert!((out.at(0, 0).re - (1.0 - e)).abs() < 1e-12);
        assert!((out.at(1, 1).re - e).abs() < 1e-12);
        // Ground state is a fixed point.
        let ground = CMat::from_rows(&[&[ONE, ZERO], &[ZERO, ZERO]]);
        assert!(ch.apply(&ground).max_abs_diff(&ground) < 1e-15);
    }

    #[test]
    fn dephasing_limit_cases() {
        // T2 = 2 T1: no pure dephasing left.
        let ch = dephasing_channel(T1, 2.0 * T1, 3e-5, TphiConvention::HalfT1).unwrap();
        assert!(ch.is_identity());
        let ch = dephasing_channel(T1, T1, 0.0, TphiConvention::HalfT1).unwrap();
        assert!(ch.is_identity());
        assert!(dephasing_channel(T1, 2.5 * T1, 1e-6, TphiConvention::HalfT1).is_err());
        // The alternative convention rejects T2 > T1.
        assert!(dephasing_channel(T1, 1.5 * T1, 1e-6, TphiConvention::FullT1).is_err());
        assert!(dephasing_channel(T1, 0.8 * T1, 1e-6, TphiConvention::FullT1).is_ok());
    }

    #[test]
    fn combined_decoherence_matches_closed_form() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240305);
        for _ in 0..200 {
            let t1 = 10f64.powf(rng.random_range(-6.0..-3.0));
            let t2 = t1 * rng.random_range(0.05..2.0);
            let t = t1 * rng.random_range(0.0..4.0);
            let a: f64 = rng.random();
            let bmax = (a * (1.0 - a)).sqrt();
            let (bre, bim): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let scale = bmax / (bre * bre + bim * bim).sqrt().max(1.0);
            let b = C64::new(bre * scale, bim * scale);

            let rho = CMat::from_rows(&[&[C64::new(a, 0.0), b], &[b.conj(), C64::new(1.0 - a, 0.0)]]);
            let ch = idle_channel(t1, t2, t, TphiConvention::HalfT1).unwrap();
            assert!(ch.completeness_defect() < 1e-12);
            let expected = decoherence_closed_form(a, b, t1, t2, t);
            assert!(
                ch.apply(&rho).max_abs_diff(&expected) < 1e-12,
                "combined decoherence deviates from the closed form"
            );
        }
    }

    #[test]
    fn off_diagonal_midpoint_example() {
        // T1 = 100 us, T2 = 50 us, t = 50 us on |+><+|.
        let (t1, t2, t) = (1e-4, 5e-5, 5e-5);
        let half = C64::new(0.5, 0.0);
        let plus = CMat::from_rows(&[&[half, half], &[half, half]]);
        let out = idle_channel(t1, t2, t, TphiConvention::HalfT1).unwrap().apply(&plus);
        let expected = 0.5 * (-1.0f64).exp();
        assert!((out.at(0, 1).re - expected).abs() < 1e-12);
        assert!((expected - 0.18394).abs() < 5e-6);
    }

    #[test]
    fn splitting_an_idle_window_composes_exactly() {
        let (t1, t2, t) = (8e-5, 6e-5, 3e-5);
        let whole = idle_channel(t1, t2, t, TphiConvention::HalfT1).unwrap();
        let half = idle_channel(t1, t2, t / 2.0, TphiConvention::HalfT1).unwrap();
        let split = half.after(&half);
        let rho = CMat::from_rows(&[
            &[C64::new(0.3, 0.0), C64::new(0.2, 0.35)],
            &[C64::new(0.2, -0.35), C64::new(0.7, 0.0)],
        ]);
        assert!(whole.apply(&rho).max_abs_diff(&split.apply(&rho)) < 1e-12);
    }

    #[test]
    fn depolarizing_identity_at_unit_fidelity() {
        for arity in [1, 2] {
            let ch = depolarizing_channel(1.0, arity).unwrap();
            assert!(ch.is_identity());
        }
    }

    #[test]
    fn single_qubit_fidelity_is_reproduced_analytically() {
        let ch = depolarizing_channel(0.999, 1).unwrap();
        assert!(ch.completeness_defect() < 1e-14);
        assert!((ch.average_gate_fidelity() - 0.999).abs() < 1e-12);
        // p = 1.5 (1 - F)
        let w = ch.mixed_unitary().unwrap();
        assert!((w[0].0 - (1.0 - 0.0015)).abs() < 1e-12);
    }

    #[test]
    fn two_qubit_fidelity_is_reproduced_analytically() {
        let ch = depolarizing_channel(0.97, 2).unwrap();
        assert!(ch.completeness_defect() < 1e-13);
        assert!((ch.average_gate_fidelity() - 0.97).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_rejects_low_fidelity() {
        assert!(depolarizing_channel(0.4, 1).is_err());
        assert!(depolarizing_channel(0.1, 2).is_err());
    }

    #[test]
    fn confusion_matrix_is_column_stochastic() {
        let m = confusion_matrix(0.01, 0.015).unwrap();
        assert!((m[0][0] + m[1][0] - 1.0).abs() < 1e-15);
        assert!((m[0][1] + m[1][1] - 1.0).abs() < 1e-15);
        assert_eq!(confusion_matrix(0.0, 0.0).unwrap(), [[1.0, 0.0], [0.0, 1.0]]);
        assert!(confusion_matrix(1.5, 0.0).is_err());
    }

    #[test]
    fn mixed_unitary_rejects_amplitude_damping() {
        let ch = amplitude_damping_channel(T1, 1e-6).unwrap();
        assert!(ch.mixed_unitary().is_none());
    }
}
