//! `noisim fit` — Boltzmann model fits of counts or exact distributions.

use std::path::PathBuf;

use clap::Args;
use noisim_core::counts::{CountsHistogram, ExactDistribution};
use noisim_core::fit::{
    fit_zeta_delta_weighted, fit_zeta_weighted, weights_from_distribution, FitResult,
};
use noisim_core::pubo::PuboPolynomial;
use noisim_core::{Error, Result};

use crate::output::{read_json, write_json};

#[derive(Args)]
pub struct FitArgs {
    /// Counts JSON (histogram of shots).
    #[arg(long, conflicts_with = "distribution")]
    counts: Option<PathBuf>,
    /// Exact-distribution JSON; weighted by --effective-shots.
    #[arg(long)]
    distribution: Option<PathBuf>,
    #[arg(long, default_value_t = 4096.0)]
    effective_shots: f64,
    #[arg(long)]
    pubo: PathBuf,
    /// zeta | zeta-delta
    #[arg(long, default_value = "zeta-delta")]
    model: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn fit_from_weights(
    energy: &PuboPolynomial,
    observed: Vec<(u64, f64)>,
    model: &str,
) -> Result<FitResult> {
    match model {
        "zeta" => fit_zeta_weighted(energy, observed),
        "zeta-delta" => fit_zeta_delta_weighted(energy, observed),
        other => Err(Error::InvalidParameter(format!(
            "unknown model `{other}` (zeta | zeta-delta)"
        ))),
    }
}

pub fn run(args: FitArgs) -> Result<()> {
    let energy: PuboPolynomial = read_json(&args.pubo)?;
    let observed = match (&args.counts, &args.distribution) {
        (Some(path), None) => {
            let counts: CountsHistogram = read_json(path)?;
            if counts.num_bits != energy.num_vars {
                return Err(Error::DimensionMismatch(counts.num_bits, energy.num_vars));
            }
            counts.weighted_states()
        }
        (None, Some(path)) => {
            let dist: ExactDistribution = read_json(path)?;
            if dist.num_bits != energy.num_vars {
                return Err(Error::DimensionMismatch(dist.num_bits, energy.num_vars));
            }
            weights_from_distribution(&dist.probs, args.effective_shots)
        }
        _ => {
            return Err(Error::InvalidParameter(
                "give exactly one of --counts or --distribution".into(),
            ))
        }
    };
    let fit = fit_from_weights(&energy, observed, &args.model)?;
    match args.out {
        Some(path) => {
            write_json(&path, &fit)?;
            println!("wrote {}", path.display());
        }
        None => println!("{}", serde_json::to_string_pretty(&fit)?),
    }
    Ok(())
}
