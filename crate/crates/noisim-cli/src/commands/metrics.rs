//! `noisim metrics` — distances between two outcome files.

use std::path::{Path, PathBuf};

use clap::Args;
use noisim_core::counts::{CountsHistogram, ExactDistribution};
use noisim_core::dist::{
    classical_fidelity, hellinger, jensen_shannon, kullback_leibler, total_variation, Distribution,
};
use noisim_core::Result;
use serde::Serialize;

use crate::output::{read_json, write_json};

#[derive(Args)]
pub struct MetricsArgs {
    /// Counts or exact-distribution JSON.
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct MetricsReport {
    hellinger: f64,
    classical_fidelity: f64,
    total_variation: f64,
    jensen_shannon: f64,
    /// Serialised as null when infinite (disjoint supports).
    kullback_leibler: f64,
}

fn load_distribution(path: &Path) -> Result<Distribution> {
    // Counts files carry a `shots` field, exact distributions do not; try
    // counts first, fall back to the exact form.
    if let Ok(counts) = read_json::<CountsHistogram>(path) {
        return Ok(Distribution::from_counts(&counts));
    }
    let exact: ExactDistribution = read_json(path)?;
    let d = Distribution::from_probs(exact.num_bits, exact.probs)?;
    Ok(d)
}

pub fn run(args: MetricsArgs) -> Result<()> {
    let a = load_distribution(&args.a)?;
    let b = load_distribution(&args.b)?;
    let report = MetricsReport {
        hellinger: hellinger(&a, &b)?,
        classical_fidelity: classical_fidelity(&a, &b)?,
        total_variation: total_variation(&a, &b)?,
        jensen_shannon: jensen_shannon(&a, &b)?,
        kullback_leibler: kullback_leibler(&a, &b)?,
    };
    match args.out {
        Some(path) => {
            write_json(&path, &report)?;
            println!("wrote {}", path.display());
        }
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(())
}
