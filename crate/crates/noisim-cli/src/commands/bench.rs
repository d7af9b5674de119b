//! `noisim bench` — benchmark circuit generation.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use noisim_core::bench::{ghz_tiled_circuit, hahn_echo_circuit, idle_t1_circuit};
use noisim_core::circuit::Topology;
use noisim_core::jss::{default_durations, jss_dense_pubo, jss_onehot_pubo, JssInstance};
use noisim_core::pubo::DEFAULT_ENUMERATION_LIMIT;
use noisim_core::qaoa::{lr_qaoa_circuit, LrSchedule};
use noisim_core::snapshot::DeviceSnapshot;
use noisim_core::{Error, Result};
use serde::Serialize;

use crate::output::{in_dir, parse_list, read_json, write_json};

#[derive(Args)]
pub struct BenchArgs {
    #[command(subcommand)]
    kind: BenchKind,
}

#[derive(Subcommand)]
enum BenchKind {
    /// Excite, idle for --t seconds, measure.
    IdleT1 {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hahn echo: |+>, idle t/2, X, idle t/2, rotate back, measure.
    HahnEcho {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tiled 3-qubit GHZ preparations on neighbouring triplets.
    Ghz {
        /// Semicolon-separated triplets, e.g. "0,1,2;3,4,5".
        #[arg(long)]
        triplets: String,
        /// Snapshot supplying the topology; a line over the named qubits
        /// when absent.
        #[arg(long)]
        snapshot: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// LR-QAOA circuit for a job-shop load-balancing instance.
    QaoaJss {
        #[arg(long)]
        jobs: usize,
        /// Comma-separated durations; a fixed table when absent.
        #[arg(long)]
        durations: Option<String>,
        #[arg(long, default_value_t = 2)]
        machines: usize,
        /// dense | onehot
        #[arg(long, default_value = "dense")]
        encoding: String,
        /// One-hot penalty weight; 2 (sum t)^2 / n_m when absent.
        #[arg(long)]
        penalty: Option<f64>,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 0.5)]
        ramp_beta: f64,
        #[arg(long, default_value_t = 0.5)]
        ramp_gamma: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Serialize)]
struct QaoaMeta {
    encoding: String,
    jobs: usize,
    machines: usize,
    durations: Vec<f64>,
    penalty: Option<f64>,
    depth: usize,
    ramp_beta: f64,
    ramp_gamma: f64,
    qubits: usize,
    ground_energy: f64,
    ground_degeneracy: u64,
    ground_state: String,
}

pub fn run(args: BenchArgs) -> Result<()> {
    match args.kind {
        BenchKind::IdleT1 { t, out } => {
            write_json(&in_dir(&out, "circuit.json"), &idle_t1_circuit(t)?)?;
            println!("wrote {}", out.join("circuit.json").display());
            Ok(())
        }
        BenchKind::HahnEcho { t, out } => {
            write_json(&in_dir(&out, "circuit.json"), &hahn_echo_circuit(t)?)?;
            println!("wrote {}", out.join("circuit.json").display());
            Ok(())
        }
        BenchKind::Ghz {
            triplets,
            snapshot,
            out,
        } => {
            let mut parsed: Vec<[usize; 3]> = Vec::new();
            for part in triplets.split(';').filter(|p| !p.trim().is_empty()) {
                let qs: Vec<usize> = parse_list(part, "triplet")?;
                if qs.len() != 3 {
                    return Err(Error::InvalidParameter(format!(
                        "triplet `{part}` does not have three qubits"
                    )));
                }
                parsed.push([qs[0], qs[1], qs[2]]);
            }
            let topology = match snapshot {
                Some(path) => {
                    let snap: DeviceSnapshot = read_json(&path)?;
                    snap.validate()?;
                    snap.topology_graph()?
                }
                None => {
                    let max = parsed
                        .iter()
                        .flatten()
                        .copied()
                        .max()
                        .ok_or_else(|| Error::InvalidParameter("no triplets given".into()))?;
                    Topology::line(max + 1)
                }
            };
            let circuit = ghz_tiled_circuit(&topology, &parsed)?;
            write_json(&in_dir(&out, "circuit.json"), &circuit)?;
            println!("wrote {}", out.join("circuit.json").display());
            Ok(())
        }
        BenchKind::QaoaJss {
            jobs,
            durations,
            machines,
            encoding,
            penalty,
            depth,
            ramp_beta,
            ramp_gamma,
            out,
        } => {
            let durations = match durations {
                Some(text) => parse_list(&text, "duration")?,
                None => default_durations(jobs),
            };
            if durations.len() != jobs {
                return Err(Error::InvalidParameter(format!(
                    "{} durations given for {jobs} jobs",
                    durations.len()
                )));
            }
            let instance = JssInstance::new(durations.clone(), machines)?;
            let (energy, used_penalty) = match encoding.as_str() {
                "dense" => (jss_dense_pubo(&instance)?, None),
                "onehot" => {
                    let p = penalty.unwrap_or_else(|| instance.default_penalty());
                    (jss_onehot_pubo(&instance, p)?, Some(p))
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown encoding `{other}` (dense | onehot)"
                    )))
                }
            };
            let schedule = LrSchedule::new(depth, ramp_beta, ramp_gamma)?;
            let circuit = lr_qaoa_circuit(&energy, &schedule)?;
            let ground = energy.ground_state(DEFAULT_ENUMERATION_LIMIT)?;
            let meta = QaoaMeta {
                encoding,
                jobs,
                machines,
                durations,
                penalty: used_penalty,
                depth,
                ramp_beta,
                ramp_gamma,
                qubits: energy.num_vars,
                ground_energy: ground.energy,
                ground_degeneracy: ground.degeneracy,
                ground_state: noisim_core::circuit::index_to_bitstring(
                    ground.state,
                    energy.num_vars,
                ),
            };
            write_json(&in_dir(&out, "circuit.json"), &circuit)?;
            write_json(&in_dir(&out, "pubo.json"), &energy)?;
            write_json(&in_dir(&out, "instance.json"), &instance)?;
            write_json(&in_dir(&out, "meta.json"), &meta)?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}
