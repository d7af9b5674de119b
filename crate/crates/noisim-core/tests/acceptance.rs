//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its runtime (visible with `--nocapture`).
//!
//! Criteria are ordered and numbered; every tolerance is pinned in the
//! constants right where it is asserted. Tests serialise on a mutex so the
//! per-criterion wall-clock bounds are measured without contention.

use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use noisim_core::bench::{ghz3_reference_distribution, ghz_tiled_circuit, hahn_echo_circuit, idle_t1_circuit};
use noisim_core::circuit::{Circuit, GateKind, Topology};
use noisim_core::counts::sample_counts;
use noisim_core::dist::{hellinger, total_variation, Distribution};
use noisim_core::fit::{
    fit_zeta_delta_weighted, fit_zeta_weighted, gain_ratio, weights_from_distribution,
};
use noisim_core::jss::{
    canonical_partition, default_durations, dense_assignment, jss_dense_pubo, jss_onehot_pubo,
    onehot_assignment, JssInstance,
};
use noisim_core::kraus::{
    amplitude_damping_channel, confusion_matrix, decoherence_closed_form, dephasing_channel,
    depolarizing_channel, idle_channel, TphiConvention,
};
use noisim_core::linalg::{equal_up_to_global_phase, CMat, C64};
use noisim_core::noise_model::{NoiseToggles, NoisyProgram};
use noisim_core::pipeline::{run_circuit, Backend, PipelineOptions};
use noisim_core::pubo::PuboPolynomial;
use noisim_core::qaoa::{cost_block, lr_qaoa_circuit, LrSchedule};
use noisim_core::snapshot::{DeviceSnapshot, SyntheticSpec, TopologyKind};

static GATE: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn report(criterion: &str, started: Instant, budget_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < budget_s,
        "criterion {criterion}: runtime {elapsed:.1} s exceeds the {budget_s} s budget"
    );
    println!("criterion {criterion}: PASS ({elapsed:.2} s)");
}

fn default_snapshot(qubits: usize) -> DeviceSnapshot {
    DeviceSnapshot::synthetic(qubits, SyntheticSpec::default()).expect("valid synthetic snapshot")
}

fn full_topology_snapshot(qubits: usize) -> DeviceSnapshot {
    let spec = SyntheticSpec {
        topology_kind: TopologyKind::Full,
        ..SyntheticSpec::default()
    };
    DeviceSnapshot::synthetic(qubits, spec).expect("valid synthetic snapshot")
}

fn exact_probs(circuit: &Circuit, snapshot: &DeviceSnapshot, toggles: NoiseToggles, ideal: bool) -> Vec<f64> {
    let options = PipelineOptions {
        toggles,
        ideal,
        ..Default::default()
    };
    run_circuit(circuit, snapshot, &options)
        .expect("pipeline run")
        .exact
        .expect("density backend emits the exact distribution")
        .probs
}

/// p-tilde from the noise-floor fit of an exact distribution (weight 4096).
fn exact_p_tilde(energy: &PuboPolynomial, probs: &[f64]) -> f64 {
    fit_zeta_delta_weighted(energy, weights_from_distribution(probs, 4096.0))
        .expect("fit converges")
        .p_tilde
}

// --- 1: channel validity ------------------------------------------------------

#[test]
fn criterion_01_channel_validity() {
    let _guard = serial();
    let started = Instant::now();
    const COMPLETENESS_TOL: f64 = 1e-12;
    const ENTRYWISE_TOL: f64 = 1e-12;

    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    for _ in 0..1000 {
        let t1 = 10f64.powf(rng.random_range(-6.0..-3.0));
        let t2 = t1 * rng.random_range(0.05..2.0);
        let t = t1 * rng.random_range(0.0..4.0);

        let ad = amplitude_damping_channel(t1, t).unwrap();
        let deph = dephasing_channel(t1, t2, t, TphiConvention::HalfT1).unwrap();
        let combined = idle_channel(t1, t2, t, TphiConvention::HalfT1).unwrap();
        let depol1 = depolarizing_channel(rng.random_range(0.9..1.0), 1).unwrap();
        let depol2 = depolarizing_channel(rng.random_range(0.9..1.0), 2).unwrap();
        for channel in [&ad, &deph, &combined, &depol1, &depol2] {
            assert!(channel.completeness_defect() <= COMPLETENESS_TOL);
        }
        let m = confusion_matrix(rng.random_range(0.0..0.05), rng.random_range(0.0..0.05)).unwrap();
        assert!((m[0][0] + m[1][0] - 1.0).abs() <= COMPLETENESS_TOL);
        assert!((m[0][1] + m[1][1] - 1.0).abs() <= COMPLETENESS_TOL);

        // Random valid one-qubit density matrix; composed decoherence must
        // reproduce the phenomenological closed form entrywise.
        let a: f64 = rng.random();
        let bmax = (a * (1.0 - a)).sqrt();
        let (bre, bim): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let norm = (bre * bre + bim * bim).sqrt().max(1e-300);
        let shrink = bmax * rng.random::<f64>() / norm;
        let b = C64::new(bre * shrink, bim * shrink);
        let rho = CMat::from_rows(&[
            &[C64::new(a, 0.0), b],
            &[b.conj(), C64::new(1.0 - a, 0.0)],
        ]);
        let expected = decoherence_closed_form(a, b, t1, t2, t);
        assert!(
            combined.apply(&rho).max_abs_diff(&expected) <= ENTRYWISE_TOL,
            "decoherence composition deviates beyond {ENTRYWISE_TOL}"
        );
    }
    report("1 (channel validity)", started, 10.0);
}

// --- 2: T1 idle reproduction --------------------------------------------------

#[test]
fn criterion_02_t1_idle_reproduction() {
    let _guard = serial();
    let started = Instant::now();
    const EXACT_TOL: f64 = 1e-9;
    const SHOTS: u64 = 4096;

    let snapshot = default_snapshot(1);
    let t1 = snapshot.qubits[0].t1_s;
    for (i, factor) in [0.25f64, 0.5, 1.0, 2.0].into_iter().enumerate() {
        let circuit = idle_t1_circuit(factor * t1).unwrap();
        let probs = exact_probs(&circuit, &snapshot, NoiseToggles::decoherence_only(), false);
        let expected = (-factor).exp();
        assert!(
            (probs[1] - expected).abs() <= EXACT_TOL,
            "t = {factor} T1: P(1) = {} vs {expected}",
            probs[1]
        );

        let counts = sample_counts(&probs, 1, SHOTS, 7100 + i as u64).unwrap();
        let ones = counts.count_of(1) as f64;
        let sigma = (SHOTS as f64 * expected * (1.0 - expected)).sqrt();
        assert!(
            (ones - SHOTS as f64 * expected).abs() <= 4.0 * sigma,
            "t = {factor} T1: sampled {ones} outside 4 sigma of {}",
            SHOTS as f64 * expected
        );
    }
    report("2 (T1 idle reproduction)", started, 5.0);
}

// --- 3: Hahn echo reproduction ------------------------------------------------

#[test]
fn criterion_03_hahn_echo_reproduction() {
    let _guard = serial();
    let started = Instant::now();
    const EXACT_TOL: f64 = 1e-9;

    let snapshot = default_snapshot(1);
    let t2 = snapshot.qubits[0].t2_s;
    for factor in [0.5f64, 1.0, 2.0] {
        let circuit = hahn_echo_circuit(factor * t2).unwrap();
        let probs = exact_probs(&circuit, &snapshot, NoiseToggles::decoherence_only(), false);
        let expected = 0.5 * (1.0 - (-factor).exp());
        assert!(
            (probs[1] - expected).abs() <= EXACT_TOL,
            "t = {factor} T2: P(1) = {} vs {expected}",
            probs[1]
        );
    }
    report("3 (Hahn echo reproduction)", started, 5.0);
}

// --- 4: GHZ distances ---------------------------------------------------------

#[test]
fn criterion_04_ghz_distances() {
    let _guard = serial();
    let started = Instant::now();
    // HD picks up the square root of any float dust sitting on states the
    // reference gives zero mass (p ~ 1e-17 contributes sqrt(p/2) ~ 2e-9),
    // so "zero distance" at double precision is bounded by sqrt-noise.
    const NOISELESS_TOL: f64 = 1e-7;
    const BAND: (f64, f64) = (0.02, 0.40);

    let snapshot = default_snapshot(3);
    let circuit = ghz_tiled_circuit(&Topology::line(3), &[[0, 1, 2]]).unwrap();
    let reference = Distribution::from_probs(3, ghz3_reference_distribution()).unwrap();

    let noiseless = exact_probs(&circuit, &snapshot, NoiseToggles::all_off(), false);
    let hd0 = hellinger(
        &Distribution::from_probs(3, noiseless.clone()).unwrap(),
        &reference,
    )
    .unwrap();
    assert!(hd0 <= NOISELESS_TOL, "noiseless GHZ HD = {hd0}");

    let noisy = exact_probs(&circuit, &snapshot, NoiseToggles::all_on(), false);
    let hd = hellinger(
        &Distribution::from_probs(3, noisy).unwrap(),
        &Distribution::from_probs(3, noiseless).unwrap(),
    )
    .unwrap();
    assert!(
        (BAND.0..=BAND.1).contains(&hd),
        "noisy-vs-noiseless GHZ HD = {hd} outside [{}, {}]",
        BAND.0,
        BAND.1
    );
    report("4 (GHZ distances)", started, 10.0);
}

// --- 5: backend equivalence ---------------------------------------------------

fn random_circuit(rng: &mut ChaCha8Rng, qubits: usize, gates: usize) -> Circuit {
    let mut c = Circuit::new(qubits);
    for _ in 0..gates {
        match rng.random_range(0..6u32) {
            0 => c.push(GateKind::H, vec![rng.random_range(0..qubits)]),
            1 => c.push(GateKind::Sx, vec![rng.random_range(0..qubits)]),
            2 => c.push(GateKind::X, vec![rng.random_range(0..qubits)]),
            3 => c.push(
                GateKind::Rz(rng.random_range(-3.0..3.0)),
                vec![rng.random_range(0..qubits)],
            ),
            _ => {
                let a = rng.random_range(0..qubits);
                let mut b = rng.random_range(0..qubits);
                while b == a {
                    b = rng.random_range(0..qubits);
                }
                c.push(GateKind::Cx, vec![a, b]);
            }
        }
    }
    for q in 0..qubits {
        c.push(GateKind::Measure, vec![q]);
    }
    c
}

#[test]
fn criterion_05_backend_equivalence() {
    let _guard = serial();
    let started = Instant::now();
    const SHOTS: u64 = 100_000;
    let bound = 4.0 * (32.0f64 / SHOTS as f64).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(424242);
    let spec = SyntheticSpec {
        jitter: 0.3,
        seed: 5,
        ..SyntheticSpec::default()
    };
    let snapshot = DeviceSnapshot::synthetic(5, spec).unwrap();
    for i in 0..10 {
        let circuit = random_circuit(&mut rng, 5, 18);
        let exact = exact_probs(&circuit, &snapshot, NoiseToggles::all_on(), false);
        let options = PipelineOptions {
            backend: Backend::Trajectory,
            shots: SHOTS,
            seed: 1000 + i,
            toggles: NoiseToggles::all_on(),
            ..Default::default()
        };
        let counts = run_circuit(&circuit, &snapshot, &options).unwrap().counts;
        let tvd = total_variation(
            &Distribution::from_counts(&counts),
            &Distribution::from_probs(5, exact).unwrap(),
        )
        .unwrap();
        assert!(tvd <= bound, "program {i}: TVD {tvd} above {bound}");
    }
    report("5 (backend equivalence)", started, 120.0);
}

// --- 6: MLE analytics ---------------------------------------------------------

#[test]
fn criterion_06_mle_analytics() {
    let _guard = serial();
    let started = Instant::now();

    // Two-level counts (75, 25): zeta = ln 3.
    let two_level = PuboPolynomial::from_terms(1, vec![(vec![0], 1.0)]).unwrap();
    let fit = fit_zeta_weighted(&two_level, vec![(0, 75.0), (1, 25.0)]).unwrap();
    assert!((fit.zeta - 3.0f64.ln()).abs() <= 1e-6, "zeta = {}", fit.zeta);

    // Exact Boltzmann weights recover the generating zeta to 1e-9.
    let energy = PuboPolynomial::from_terms(
        4,
        vec![(vec![0], 1.0), (vec![1], 0.6), (vec![2, 3], -0.8), (vec![3], 1.7)],
    )
    .unwrap();
    let zeta0 = 1.3;
    let raw: Vec<f64> = (0..16).map(|x| (-zeta0 * energy.evaluate(x)).exp()).collect();
    let z: f64 = raw.iter().sum();
    let observed: Vec<(u64, f64)> = raw
        .iter()
        .enumerate()
        .map(|(i, p)| (i as u64, 4096.0 * p / z))
        .collect();
    let fit = fit_zeta_weighted(&energy, observed).unwrap();
    assert!((fit.zeta - zeta0).abs() <= 1e-9, "zeta = {}", fit.zeta);

    // Uniform counts sit at zeta = 0.
    let uniform: Vec<(u64, f64)> = (0..16).map(|i| (i as u64, 100.0)).collect();
    let fit = fit_zeta_weighted(&energy, uniform).unwrap();
    assert!(fit.zeta.abs() <= 1e-9, "zeta = {}", fit.zeta);

    // Noise-floor recovery: synthetic (zeta, delta) = (2, 0.05) on the
    // 6-qubit dense JSS energy, 1e5 shots, 1-sigma coverage on >= 2 of 3
    // seeds for both parameters.
    let instance = JssInstance::new(default_durations(6), 2).unwrap();
    let energy6 = jss_dense_pubo(&instance).unwrap();
    let (true_zeta, true_delta) = (2.0, 0.05);
    let raw: Vec<f64> = (0..64)
        .map(|x| (-true_zeta * energy6.evaluate(x)).exp() + true_delta)
        .collect();
    let z: f64 = raw.iter().sum();
    let probs: Vec<f64> = raw.iter().map(|p| p / z).collect();
    let mut covered = 0;
    for seed in [11u64, 22, 33] {
        let counts = sample_counts(&probs, 6, 100_000, seed).unwrap();
        let fit = fit_zeta_delta_weighted(&energy6, counts.weighted_states()).unwrap();
        let zi = fit.zeta_interval;
        let di = fit.delta_interval.unwrap();
        if zi.lo <= true_zeta && true_zeta <= zi.hi && di.lo <= true_delta && true_delta <= di.hi {
            covered += 1;
        }
    }
    assert!(covered >= 2, "1-sigma coverage on {covered} of 3 seeds");
    report("6 (MLE analytics)", started, 30.0);
}

// --- 7: QAOA depth trend ------------------------------------------------------

/// Ramp sizes for the acceptance QAOA runs: the mixer ramp is the 0.5
/// default; the cost ramp is matched to the instance's energy span so the
/// largest phase stays of order one (gamma_max * span = 2.5 for the 4-job
/// instance, as for the 2-job default).
fn acceptance_schedule(jobs: usize, layers: usize) -> LrSchedule {
    let delta_gamma = if jobs >= 4 { 0.05 } else { 0.5 };
    LrSchedule::new(layers, 0.5, delta_gamma).unwrap()
}

#[test]
fn criterion_07_qaoa_depth_trend() {
    let _guard = serial();
    let started = Instant::now();

    for jobs in [2usize, 4] {
        let instance = JssInstance::new(default_durations(jobs), 2).unwrap();
        let energy = jss_dense_pubo(&instance).unwrap();
        let snapshot = full_topology_snapshot(energy.num_vars);
        let mut previous = f64::NEG_INFINITY;
        for layers in [1usize, 2, 4, 8] {
            let circuit = lr_qaoa_circuit(&energy, &acceptance_schedule(jobs, layers)).unwrap();
            let ideal = exact_p_tilde(
                &energy,
                &exact_probs(&circuit, &snapshot, NoiseToggles::all_off(), true),
            );
            let noisy = exact_p_tilde(
                &energy,
                &exact_probs(&circuit, &snapshot, NoiseToggles::gates_and_spam(), false),
            );
            assert!(
                ideal >= previous - 1e-12,
                "{jobs} jobs, p = {layers}: noiseless p-tilde {ideal} dropped below {previous}"
            );
            assert!(
                noisy <= ideal + 1e-12,
                "{jobs} jobs, p = {layers}: noisy p-tilde {noisy} above noiseless {ideal}"
            );
            previous = ideal;
        }
    }
    report("7 (QAOA depth trend)", started, 300.0);
}

// --- 8: gain-ratio decay ------------------------------------------------------

#[test]
fn criterion_08_gain_ratio_decay() {
    let _guard = serial();
    let started = Instant::now();
    const HALF_VALUE_BAND: (f64, f64) = (10.0, 1000.0);

    let instance = JssInstance::new(default_durations(4), 2).unwrap();
    let energy = jss_dense_pubo(&instance).unwrap();
    let snapshot = full_topology_snapshot(energy.num_vars);

    let mut points = Vec::new();
    for layers in [1usize, 2, 3, 4, 6, 8] {
        let circuit = lr_qaoa_circuit(&energy, &acceptance_schedule(4, layers)).unwrap();
        let options = PipelineOptions {
            toggles: NoiseToggles::gates_and_spam(),
            ..Default::default()
        };
        let noisy_run = run_circuit(&circuit, &snapshot, &options).unwrap();
        let gates = noisy_run.stats.two_qubit_gates as f64;
        let noisy = exact_p_tilde(&energy, &noisy_run.exact.unwrap().probs);
        let ideal = exact_p_tilde(
            &energy,
            &exact_probs(&circuit, &snapshot, NoiseToggles::all_off(), true),
        );
        let r = gain_ratio(noisy, ideal, energy.num_vars).unwrap();
        if r > 1e-4 {
            points.push((gates, r.ln()));
        }
    }
    assert!(points.len() >= 4, "only {} usable sweep points", points.len());

    // Least-squares slope of ln r against the two-qubit gate count.
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let decay_rate = -slope;
    assert!(decay_rate > 0.0, "gain ratio does not decay (rate {decay_rate})");
    let half_value = std::f64::consts::LN_2 / decay_rate;
    assert!(
        (HALF_VALUE_BAND.0..=HALF_VALUE_BAND.1).contains(&half_value),
        "half-value {half_value:.1} gates outside [{}, {}]",
        HALF_VALUE_BAND.0,
        HALF_VALUE_BAND.1
    );
    println!("  gain-ratio half-value: {half_value:.1} two-qubit gates");
    report("8 (gain-ratio decay)", started, 600.0);
}

// --- 9: fidelity-scaling monotonicity ------------------------------------------

#[test]
fn criterion_09_fidelity_scaling_monotonicity() {
    let _guard = serial();
    let started = Instant::now();
    const CONVERGENCE_TOL: f64 = 1e-3;

    let instance = JssInstance::new(default_durations(4), 2).unwrap();
    let energy = jss_dense_pubo(&instance).unwrap();
    let snapshot = full_topology_snapshot(energy.num_vars);
    let circuit = lr_qaoa_circuit(&energy, &acceptance_schedule(4, 2)).unwrap();

    let ideal = exact_p_tilde(
        &energy,
        &exact_probs(&circuit, &snapshot, NoiseToggles::all_off(), true),
    );
    let mut previous = f64::NEG_INFINITY;
    let mut last = f64::NAN;
    for k in 0..=4u32 {
        let scaled = snapshot.scale_errors(10f64.powf(-(k as f64) / 2.0)).unwrap();
        let noisy = exact_p_tilde(
            &energy,
            &exact_probs(&circuit, &scaled, NoiseToggles::gates_and_spam(), false),
        );
        assert!(
            noisy >= previous - 1e-12,
            "k = {k}: p-tilde {noisy} dropped below {previous}"
        );
        previous = noisy;
        last = noisy;
    }
    assert!(
        (last - ideal).abs() <= CONVERGENCE_TOL,
        "k = 4: p-tilde {last} vs noiseless {ideal}"
    );
    report("9 (fidelity-scaling monotonicity)", started, 300.0);
}

// --- 10: structural oracles ----------------------------------------------------

#[test]
fn criterion_10_structural_oracles() {
    let _guard = serial();
    let started = Instant::now();
    const COST_TOL: f64 = 1e-9;
    const UNITARY_TOL: f64 = 1e-10;

    // Cost-block diagonal equals e^{-i gamma E(x)} up to global phase.
    let mut rng = ChaCha8Rng::seed_from_u64(0xC10);
    for _ in 0..20 {
        let n = rng.random_range(2..=4usize);
        let mut terms = Vec::new();
        for _ in 0..rng.random_range(2..=6u32) {
            let size = rng.random_range(1..=n.min(3));
            let mut vars: Vec<usize> = (0..n).collect();
            for i in (1..vars.len()).rev() {
                vars.swap(i, rng.random_range(0..=i));
            }
            vars.truncate(size);
            terms.push((vars, rng.random_range(-2.0..2.0)));
        }
        let energy = PuboPolynomial::from_terms(n, terms).unwrap();
        let gamma: f64 = rng.random_range(0.05..1.5);
        let mut block = Circuit::new(n);
        for (kind, qubits) in cost_block(&energy, gamma) {
            block.push(kind, qubits);
        }
        let actual = block.unitary().unwrap();
        let mut expected = CMat::zeros(1 << n);
        for x in 0..(1usize << n) {
            expected.set(x, x, C64::from_polar(1.0, -gamma * energy.evaluate(x as u64)));
        }
        assert!(
            equal_up_to_global_phase(&actual, &expected, COST_TOL),
            "cost block deviates from the energy phase"
        );
    }

    // One-hot and dense encodings agree on the optimal machine partitions.
    for jobs in 2..=4usize {
        let instance = JssInstance::new(default_durations(jobs), 2).unwrap();
        let onehot = jss_onehot_pubo(&instance, instance.default_penalty()).unwrap();
        let dense = jss_dense_pubo(&instance).unwrap();
        let onehot_partitions: std::collections::BTreeSet<_> = onehot
            .minimizers(24)
            .unwrap()
            .into_iter()
            .map(|x| {
                canonical_partition(
                    &onehot_assignment(&instance, x).expect("feasible minimum"),
                    instance.machines,
                )
            })
            .collect();
        let dense_partitions: std::collections::BTreeSet<_> = dense
            .minimizers(24)
            .unwrap()
            .into_iter()
            .map(|x| canonical_partition(&dense_assignment(&instance, x), instance.machines))
            .collect();
        assert_eq!(onehot_partitions, dense_partitions, "{jobs} jobs");
    }

    // Substitution preserves unitaries on random circuits.
    let gateset_ecr = noisim_core::transpile::NativeGateSet::default();
    let gateset_cz = noisim_core::transpile::NativeGateSet::new(["rz", "sx", "x", "cz"]).unwrap();
    for i in 0..20 {
        let qubits = 2 + (i % 3);
        let mut circuit = random_circuit(&mut rng, qubits, 10);
        circuit.instructions.retain(|g| !matches!(g.kind, GateKind::Measure));
        for gateset in [&gateset_ecr, &gateset_cz] {
            let native = noisim_core::transpile::substitute_to_native(&circuit, gateset).unwrap();
            assert!(
                equal_up_to_global_phase(
                    &circuit.unitary().unwrap(),
                    &native.unitary().unwrap(),
                    UNITARY_TOL
                ),
                "substitution changed the unitary"
            );
        }
    }

    // Routing preserves the noiseless outcome distribution (logical order).
    for i in 0..10 {
        let qubits = 3 + (i % 3);
        let circuit = random_circuit(&mut rng, qubits, 12);
        let reference = {
            let program = NoisyProgram::from_circuit_noiseless(&circuit).unwrap();
            let rho = noisim_core::density::evolve_density(&program).unwrap();
            noisim_core::density::measurement_distribution(&rho, &program)
        };
        let topology = if i % 2 == 0 {
            TopologyKind::Line
        } else {
            TopologyKind::Ring
        };
        let spec = SyntheticSpec {
            topology_kind: topology,
            ..SyntheticSpec::default()
        };
        let snapshot = DeviceSnapshot::synthetic(qubits, spec).unwrap();
        let routed = exact_probs(&circuit, &snapshot, NoiseToggles::all_off(), false);
        let worst = reference
            .iter()
            .zip(&routed)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(
            worst <= UNITARY_TOL,
            "routed distribution deviates by {worst}"
        );
    }
    report("10 (structural oracles)", started, 60.0);
}
