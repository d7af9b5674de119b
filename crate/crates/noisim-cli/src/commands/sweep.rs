//! `noisim sweep` — depth and fidelity-scaling sweeps with CSV output.
//!
//! Points execute in a worker pool; each point derives its own seed
//! (base seed + point index) and is an isolated pipeline, so row order and
//! results are independent of scheduling. Failures are flagged in the
//! `status` column and the sweep continues.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use noisim_core::circuit::Circuit;
use noisim_core::fit::gain_ratio;
use noisim_core::jss::{default_durations, jss_dense_pubo, jss_onehot_pubo, JssInstance};
use noisim_core::pipeline::{run_circuit, Backend, PipelineResult};
use noisim_core::pubo::PuboPolynomial;
use noisim_core::qaoa::{lr_qaoa_circuit, LrSchedule};
use noisim_core::snapshot::DeviceSnapshot;
use noisim_core::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::fit::fit_from_weights;
use crate::commands::run::{parse_backend, parse_tphi};
use crate::config::FileConfig;
use crate::output::{csv_field, hash_of, in_dir, parse_list, read_json, write_json};

#[derive(Args)]
pub struct SweepArgs {
    #[command(subcommand)]
    kind: SweepKind,
}

#[derive(Args, Clone)]
struct SimFlags {
    #[arg(long)]
    snapshot: PathBuf,
    /// density | trajectory
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fit the exact output distribution instead of sampled counts
    /// (density backend only).
    #[arg(long)]
    exact: bool,
    /// zeta | zeta-delta
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    no_decoherence: bool,
    #[arg(long)]
    no_depolarization: bool,
    #[arg(long)]
    no_readout: bool,
    #[arg(long)]
    no_init: bool,
    #[arg(long)]
    tphi: Option<String>,
    #[arg(long)]
    density_limit: Option<usize>,
    /// key = value file supplying defaults for the flags above.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum SweepKind {
    /// QAOA depth sweep over a fixed problem instance.
    Depth {
        #[arg(long)]
        jobs: usize,
        #[arg(long)]
        durations: Option<String>,
        #[arg(long, default_value_t = 2)]
        machines: usize,
        /// dense | onehot
        #[arg(long, default_value = "dense")]
        encoding: String,
        #[arg(long)]
        penalty: Option<f64>,
        /// Comma-separated depths, e.g. 1,2,4,8.
        #[arg(long)]
        depths: String,
        #[arg(long, default_value_t = 0.5)]
        ramp_beta: f64,
        #[arg(long, default_value_t = 0.5)]
        ramp_gamma: f64,
        #[command(flatten)]
        sim: SimFlags,
    },
    /// Error-rate scaling sweep over a fixed circuit.
    Fidelity {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        pubo: PathBuf,
        /// Comma-separated k values; each point scales errors by 10^(-k/2).
        #[arg(long, default_value = "0,1,2,3,4")]
        half_decades: String,
        #[command(flatten)]
        sim: SimFlags,
    },
}

#[derive(Debug, Clone, Serialize)]
struct ResolvedSweepConfig {
    backend: Backend,
    shots: u64,
    seed: u64,
    exact: bool,
    model: String,
    toggles: noisim_core::noise_model::NoiseToggles,
    tphi: noisim_core::kraus::TphiConvention,
    density_limit: usize,
}

fn resolve(sim: &SimFlags) -> Result<ResolvedSweepConfig> {
    let file = FileConfig::load(sim.config.as_deref())?;
    let backend = parse_backend(&file.pick(sim.backend.clone(), "backend", "density".into())?)?;
    let exact = file.pick_flag(sim.exact, "exact")?;
    if exact && backend != Backend::Density {
        return Err(Error::InvalidParameter(
            "--exact needs the density backend".into(),
        ));
    }
    let model = file.pick(sim.model.clone(), "model", "zeta-delta".into())?;
    Ok(ResolvedSweepConfig {
        backend,
        shots: file.pick(sim.shots, "shots", 4096)?,
        seed: file.pick(sim.seed, "seed", 1)?,
        exact,
        model,
        toggles: noisim_core::noise_model::NoiseToggles {
            decoherence: !file.pick_flag(sim.no_decoherence, "no_decoherence")?,
            depolarization: !file.pick_flag(sim.no_depolarization, "no_depolarization")?,
            readout: !file.pick_flag(sim.no_readout, "no_readout")?,
            init: !file.pick_flag(sim.no_init, "no_init")?,
        },
        tphi: parse_tphi(&file.pick(sim.tphi.clone(), "tphi", "half-t1".into())?)?,
        density_limit: file.pick(sim.density_limit, "density_limit", 12)?,
    })
}

/// One evaluated sweep point (both pipelines plus fits).
struct PointOutcome {
    qubits: usize,
    two_qubit_gates: usize,
    circuit_depth: usize,
    p_tilde_noisy: f64,
    p_tilde_ideal: f64,
    zeta_noisy: f64,
    delta_noisy: Option<f64>,
    gain: Result<f64>,
}

fn fit_p_tilde(
    energy: &PuboPolynomial,
    result: &PipelineResult,
    config: &ResolvedSweepConfig,
) -> Result<(f64, f64, Option<f64>)> {
    let observed = if config.exact {
        let exact = result
            .exact
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("no exact distribution produced".into()))?;
        noisim_core::fit::weights_from_distribution(&exact.probs, config.shots as f64)
    } else {
        result.counts.weighted_states()
    };
    let fit = fit_from_weights(energy, observed, &config.model)?;
    Ok((fit.p_tilde, fit.zeta, fit.delta))
}

fn evaluate_point(
    circuit: &Circuit,
    energy: &PuboPolynomial,
    snapshot: &DeviceSnapshot,
    config: &ResolvedSweepConfig,
    seed: u64,
) -> Result<PointOutcome> {
    let noisy_options = noisim_core::pipeline::PipelineOptions {
        backend: config.backend,
        shots: config.shots,
        seed,
        toggles: config.toggles,
        ideal: false,
        tphi: config.tphi,
        initial_layout: None,
        density_limit: config.density_limit,
    };
    let ideal_options = noisim_core::pipeline::PipelineOptions {
        ideal: true,
        ..noisy_options.clone()
    };
    let noisy = run_circuit(circuit, snapshot, &noisy_options)?;
    let ideal = run_circuit(circuit, snapshot, &ideal_options)?;
    let (p_noisy, zeta_noisy, delta_noisy) = fit_p_tilde(energy, &noisy, config)?;
    let (p_ideal, _, _) = fit_p_tilde(energy, &ideal, config)?;
    Ok(PointOutcome {
        qubits: noisy.stats.num_qubits,
        two_qubit_gates: noisy.stats.two_qubit_gates,
        circuit_depth: noisy.stats.depth,
        p_tilde_noisy: p_noisy,
        p_tilde_ideal: p_ideal,
        zeta_noisy,
        delta_noisy,
        gain: gain_ratio(p_noisy, p_ideal, energy.num_vars),
    })
}

fn format_row(index: usize, label: (&str, String), outcome: &Result<PointOutcome>) -> String {
    let mut fields: Vec<String> = vec![index.to_string(), label.1.clone()];
    match outcome {
        Ok(point) => {
            let (gain, status) = match &point.gain {
                Ok(r) => (format!("{r}"), "ok".to_string()),
                Err(e) => (String::new(), format!("gain-ratio: {e}")),
            };
            fields.extend([
                point.qubits.to_string(),
                point.two_qubit_gates.to_string(),
                point.circuit_depth.to_string(),
                format!("{}", point.p_tilde_noisy),
                format!("{}", point.p_tilde_ideal),
                gain,
                format!("{}", point.zeta_noisy),
                point.delta_noisy.map(|d| format!("{d}")).unwrap_or_default(),
                status,
            ]);
        }
        Err(err) => {
            fields.extend(vec![String::new(); 8]);
            fields.push(format!("error: {err}"));
        }
    }
    fields
        .into_iter()
        .map(|f| csv_field(&f))
        .collect::<Vec<_>>()
        .join(",")
}

fn write_sweep_csv(
    out: &PathBuf,
    label_name: &str,
    rows: Vec<String>,
) -> Result<()> {
    let header = format!(
        "index,{label_name},qubits,two_qubit_gates,circuit_depth,p_tilde_noisy,p_tilde_ideal,gain_ratio,zeta_noisy,delta_noisy,status"
    );
    let mut text = header;
    for row in rows {
        text.push('\n');
        text.push_str(&row);
    }
    text.push('\n');
    std::fs::create_dir_all(out)?;
    std::fs::write(in_dir(out, "sweep.csv"), text)?;
    Ok(())
}

pub fn run(args: SweepArgs) -> Result<()> {
    match args.kind {
        SweepKind::Depth {
            jobs,
            durations,
            machines,
            encoding,
            penalty,
            depths,
            ramp_beta,
            ramp_gamma,
            sim,
        } => {
            let config = resolve(&sim)?;
            let snapshot: DeviceSnapshot = read_json(&sim.snapshot)?;
            snapshot.validate()?;
            let durations = match durations {
                Some(text) => parse_list(&text, "duration")?,
                None => default_durations(jobs),
            };
            let instance = JssInstance::new(durations, machines)?;
            let energy = match encoding.as_str() {
                "dense" => jss_dense_pubo(&instance)?,
                "onehot" => {
                    jss_onehot_pubo(&instance, penalty.unwrap_or_else(|| instance.default_penalty()))?
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown encoding `{other}` (dense | onehot)"
                    )))
                }
            };
            let depths: Vec<usize> = parse_list(&depths, "depth")?;

            let rows: Vec<String> = depths
                .par_iter()
                .enumerate()
                .map(|(index, &depth)| {
                    let outcome = LrSchedule::new(depth, ramp_beta, ramp_gamma)
                        .and_then(|schedule| lr_qaoa_circuit(&energy, &schedule))
                        .and_then(|circuit| {
                            evaluate_point(
                                &circuit,
                                &energy,
                                &snapshot,
                                &config,
                                config.seed + index as u64,
                            )
                        });
                    format_row(index, ("depth", depth.to_string()), &outcome)
                })
                .collect();

            write_json(&in_dir(&sim.out, "config.json"), &config)?;
            write_json(&in_dir(&sim.out, "pubo.json"), &energy)?;
            write_json(&in_dir(&sim.out, "instance.json"), &instance)?;
            write_sweep_csv(&sim.out, "depth", rows)?;
            println!(
                "wrote {} ({} points, config {})",
                sim.out.join("sweep.csv").display(),
                depths.len(),
                hash_of(&config)?
            );
            Ok(())
        }
        SweepKind::Fidelity {
            circuit,
            pubo,
            half_decades,
            sim,
        } => {
            let config = resolve(&sim)?;
            let snapshot: DeviceSnapshot = read_json(&sim.snapshot)?;
            snapshot.validate()?;
            let circuit: Circuit = read_json(&circuit)?;
            circuit.validate()?;
            let energy: PuboPolynomial = read_json(&pubo)?;
            let ks: Vec<u32> = parse_list(&half_decades, "half-decade")?;

            let rows: Vec<String> = ks
                .par_iter()
                .enumerate()
                .map(|(index, &k)| {
                    let factor = 10f64.powf(-(k as f64) / 2.0);
                    let outcome = snapshot.scale_errors(factor).and_then(|scaled| {
                        evaluate_point(
                            &circuit,
                            &energy,
                            &scaled,
                            &config,
                            config.seed + index as u64,
                        )
                    });
                    format_row(index, ("half_decades", k.to_string()), &outcome)
                })
                .collect();

            write_json(&in_dir(&sim.out, "config.json"), &config)?;
            write_sweep_csv(&sim.out, "half_decades", rows)?;
            println!(
                "wrote {} ({} points)",
                sim.out.join("sweep.csv").display(),
                ks.len()
            );
            Ok(())
        }
    }
}
