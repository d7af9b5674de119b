//! `noisim device` — snapshot generation, inspection, scaling, flattening.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use noisim_core::snapshot::{DeviceSnapshot, SyntheticSpec, TopologyKind};
use noisim_core::{Error, Result};
use serde::Serialize;

use crate::output::{read_json, write_json};

#[derive(Args)]
pub struct DeviceArgs {
    #[command(subcommand)]
    action: DeviceAction,
}

#[derive(Subcommand)]
enum DeviceAction {
    /// Emit a synthetic snapshot with reference-magnitude defaults.
    Generate {
        #[arg(long)]
        qubits: usize,
        /// line | ring | full
        #[arg(long, default_value = "line")]
        topology: String,
        #[arg(long, default_value_t = 1e-5)]
        t1: f64,
        #[arg(long, default_value_t = 1e-5)]
        t2: f64,
        #[arg(long, default_value_t = 0.9996)]
        f1: f64,
        #[arg(long, default_value_t = 0.97)]
        f2: f64,
        #[arg(long, default_value_t = 0.01)]
        readout_e0: f64,
        #[arg(long, default_value_t = 0.01)]
        readout_e1: f64,
        #[arg(long, default_value_t = 0.0)]
        init_e1: f64,
        #[arg(long, default_value_t = 1e-8)]
        t_1q: f64,
        #[arg(long, default_value_t = 1e-8)]
        t_2q: f64,
        /// Comma-separated native gates.
        #[arg(long, default_value = "rz,sx,x,ecr")]
        basis: String,
        /// Relative per-qubit/per-gate spread (0 = identical parameters).
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a short summary of a snapshot.
    Inspect {
        #[arg(long)]
        snapshot: PathBuf,
    },
    /// Scale all error rates by 10^(-k/2) (or an explicit factor).
    Scale {
        #[arg(long)]
        snapshot: PathBuf,
        /// k in factor = 10^(-k/2).
        #[arg(long, conflicts_with = "factor")]
        half_decades: Option<u32>,
        /// Direct scale factor for the error rates.
        #[arg(long)]
        factor: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replace every parameter by its median over the device.
    Median {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Serialize)]
struct InspectReport {
    qubits: usize,
    edges: usize,
    basis: Vec<String>,
    median_t1_s: f64,
    median_t2_s: f64,
    median_readout_e0: f64,
    median_readout_e1: f64,
    gate_fidelity_range: (f64, f64),
}

pub fn run(args: DeviceArgs) -> Result<()> {
    match args.action {
        DeviceAction::Generate {
            qubits,
            topology,
            t1,
            t2,
            f1,
            f2,
            readout_e0,
            readout_e1,
            init_e1,
            t_1q,
            t_2q,
            basis,
            jitter,
            seed,
            out,
        } => {
            let topology_kind = match topology.as_str() {
                "line" => TopologyKind::Line,
                "ring" => TopologyKind::Ring,
                "full" => TopologyKind::Full,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown topology `{other}` (line | ring | full)"
                    )))
                }
            };
            let spec = SyntheticSpec {
                t1_s: t1,
                t2_s: t2,
                fidelity_1q: f1,
                fidelity_2q: f2,
                readout_e0,
                readout_e1,
                init_e1,
                duration_1q_s: t_1q,
                duration_2q_s: t_2q,
                basis: basis.split(',').map(|s| s.trim().to_string()).collect(),
                topology_kind,
                jitter,
                seed,
            };
            let snapshot = DeviceSnapshot::synthetic(qubits, spec)?;
            write_json(&out, &snapshot)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        DeviceAction::Inspect { snapshot } => {
            let snap: DeviceSnapshot = read_json(&snapshot)?;
            snap.validate()?;
            let median = snap.median();
            let fids: Vec<f64> = snap.gates.iter().map(|g| g.fidelity).collect();
            let report = InspectReport {
                qubits: snap.num_qubits(),
                edges: snap.topology.len(),
                basis: snap.basis.clone(),
                median_t1_s: median.qubits[0].t1_s,
                median_t2_s: median.qubits[0].t2_s,
                median_readout_e0: median.qubits[0].readout_e0,
                median_readout_e1: median.qubits[0].readout_e1,
                gate_fidelity_range: (
                    fids.iter().copied().fold(f64::INFINITY, f64::min),
                    fids.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                ),
            };
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
        DeviceAction::Scale {
            snapshot,
            half_decades,
            factor,
            out,
        } => {
            let snap: DeviceSnapshot = read_json(&snapshot)?;
            snap.validate()?;
            let factor = match (half_decades, factor) {
                (Some(k), None) => 10f64.powf(-(k as f64) / 2.0),
                (None, Some(f)) => f,
                (None, None) => {
                    return Err(Error::InvalidParameter(
                        "give either --half-decades or --factor".into(),
                    ))
                }
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            let scaled = snap.scale_errors(factor)?;
            write_json(&out, &scaled)?;
            println!("wrote {} (factor {factor})", out.display());
            Ok(())
        }
        DeviceAction::Median { snapshot, out } => {
            let snap: DeviceSnapshot = read_json(&snapshot)?;
            snap.validate()?;
            write_json(&out, &snap.median())?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}
