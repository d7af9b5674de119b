//! `noisim run` — full pipeline execution with artifact output.
//!
//! Output directory layout: config.json, circuit.json (the input),
//! transpiled.json, counts.json, distribution.json (density backend) and
//! record.json.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use noisim_core::circuit::Circuit;
use noisim_core::kraus::TphiConvention;
use noisim_core::noise_model::NoiseToggles;
use noisim_core::pipeline::{run_circuit, Backend, CircuitStats, PipelineOptions};
use noisim_core::snapshot::DeviceSnapshot;
use noisim_core::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::config::FileConfig;
use crate::output::{hash_of, in_dir, parse_list, read_json, write_json};

#[derive(Args)]
pub struct RunArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long)]
    pub snapshot: PathBuf,
    /// density | trajectory
    #[arg(long)]
    pub backend: Option<String>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Skip the noise pass entirely.
    #[arg(long)]
    pub ideal: bool,
    #[arg(long)]
    pub no_decoherence: bool,
    #[arg(long)]
    pub no_depolarization: bool,
    #[arg(long)]
    pub no_readout: bool,
    #[arg(long)]
    pub no_init: bool,
    /// Pure-dephasing time convention: half-t1 | full-t1.
    #[arg(long)]
    pub tphi: Option<String>,
    /// Initial logical-to-physical layout, e.g. "0,2,1".
    #[arg(long)]
    pub layout: Option<String>,
    #[arg(long)]
    pub density_limit: Option<usize>,
    /// Energy polynomial; when given, the outputs are fitted and fit.json
    /// is written next to the counts.
    #[arg(long)]
    pub pubo: Option<PathBuf>,
    /// Fit model when --pubo is given: zeta | zeta-delta.
    #[arg(long, default_value = "zeta-delta")]
    pub model: String,
    /// key = value file supplying defaults for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

/// The resolved configuration persisted next to the results.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolvedRunConfig {
    pub backend: Backend,
    pub shots: u64,
    pub seed: u64,
    pub ideal: bool,
    pub toggles: NoiseToggles,
    pub tphi: TphiConvention,
    pub layout: Option<Vec<usize>>,
    pub density_limit: usize,
}

#[derive(Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub backend: Backend,
    pub shots: u64,
    pub seed: u64,
    pub stats: CircuitStats,
    pub counts_file: String,
    pub distribution_file: Option<String>,
    pub fit_file: Option<String>,
    pub wall_clock_s: f64,
}

pub fn parse_backend(text: &str) -> Result<Backend> {
    match text {
        "density" => Ok(Backend::Density),
        "trajectory" => Ok(Backend::Trajectory),
        other => Err(Error::InvalidParameter(format!(
            "unknown backend `{other}` (density | trajectory)"
        ))),
    }
}

pub fn parse_tphi(text: &str) -> Result<TphiConvention> {
    match text {
        "half-t1" => Ok(TphiConvention::HalfT1),
        "full-t1" => Ok(TphiConvention::FullT1),
        other => Err(Error::InvalidParameter(format!(
            "unknown convention `{other}` (half-t1 | full-t1)"
        ))),
    }
}

pub fn resolve(args: &RunArgs) -> Result<ResolvedRunConfig> {
    let file = FileConfig::load(args.config.as_deref())?;
    let backend = parse_backend(&file.pick(args.backend.clone(), "backend", "density".into())?)?;
    let tphi = parse_tphi(&file.pick(args.tphi.clone(), "tphi", "half-t1".into())?)?;
    let layout = match file.pick(args.layout.clone(), "layout", String::new())? {
        ref s if s.is_empty() => None,
        s => Some(parse_list(&s, "layout")?),
    };
    let toggles = NoiseToggles {
        decoherence: !file.pick_flag(args.no_decoherence, "no_decoherence")?,
        depolarization: !file.pick_flag(args.no_depolarization, "no_depolarization")?,
        readout: !file.pick_flag(args.no_readout, "no_readout")?,
        init: !file.pick_flag(args.no_init, "no_init")?,
    };
    Ok(ResolvedRunConfig {
        backend,
        shots: file.pick(args.shots, "shots", 4096)?,
        seed: file.pick(args.seed, "seed", 1)?,
        ideal: file.pick_flag(args.ideal, "ideal")?,
        toggles,
        tphi,
        layout,
        density_limit: file.pick(args.density_limit, "density_limit", 12)?,
    })
}

impl ResolvedRunConfig {
    pub fn pipeline_options(&self) -> PipelineOptions {
        PipelineOptions {
            backend: self.backend,
            shots: self.shots,
            seed: self.seed,
            toggles: self.toggles,
            ideal: self.ideal,
            tphi: self.tphi,
            initial_layout: self.layout.clone(),
            density_limit: self.density_limit,
        }
    }
}

pub fn run(args: RunArgs) -> Result<()> {
    let circuit: Circuit = read_json(&args.circuit)?;
    circuit.validate()?;
    let snapshot: DeviceSnapshot = read_json(&args.snapshot)?;
    snapshot.validate()?;
    let resolved = resolve(&args)?;

    let started = Instant::now();
    let result = run_circuit(&circuit, &snapshot, &resolved.pipeline_options())?;
    let wall_clock_s = started.elapsed().as_secs_f64();

    let out = &args.out;
    write_json(&in_dir(out, "config.json"), &resolved)?;
    write_json(&in_dir(out, "circuit.json"), &circuit)?;
    write_json(&in_dir(out, "transpiled.json"), &result.transpiled)?;
    write_json(&in_dir(out, "counts.json"), &result.counts)?;
    let distribution_file = match &result.exact {
        Some(exact) => {
            write_json(&in_dir(out, "distribution.json"), exact)?;
            Some("distribution.json".to_string())
        }
        None => None,
    };
    let fit_file = match &args.pubo {
        Some(path) => {
            let energy: noisim_core::pubo::PuboPolynomial = read_json(path)?;
            // Prefer the exact distribution when the backend produced one.
            let observed = match &result.exact {
                Some(exact) => noisim_core::fit::weights_from_distribution(
                    &exact.probs,
                    resolved.shots as f64,
                ),
                None => result.counts.weighted_states(),
            };
            let fit = crate::commands::fit::fit_from_weights(&energy, observed, &args.model)?;
            write_json(&in_dir(out, "fit.json"), &fit)?;
            Some("fit.json".to_string())
        }
        None => None,
    };
    let record = RunRecord {
        config_hash: hash_of(&resolved)?,
        backend: resolved.backend,
        shots: resolved.shots,
        seed: resolved.seed,
        stats: result.stats,
        counts_file: "counts.json".into(),
        distribution_file,
        fit_file,
        wall_clock_s,
    };
    write_json(&in_dir(out, "record.json"), &record)?;
    println!(
        "wrote {} ({} qubits, {} two-qubit gates, depth {})",
        out.display(),
        record.stats.num_qubits,
        record.stats.two_qubit_gates,
        record.stats.depth
    );
    Ok(())
}
