//! Calibration-driven noisy quantum circuit simulation.
//!
//! The crate covers the full loop from device calibration data to noise-model
//! quality numbers:
//!
//! - [`circuit`], [`transpile`], [`schedule`]: circuit IR, native-gateset
//!   substitution, SWAP routing and ASAP timelines with explicit idle windows;
//! - [`snapshot`], [`kraus`], [`noise_model`]: calibration snapshots and the
//!   Kraus channels built from them (amplitude damping, pure dephasing,
//!   depolarising, SPAM), assembled into noisy programs;
//! - [`density`], [`trajectory`], [`counts`]: an exact density-matrix backend
//!   and a stochastic trajectory sampler, plus shot histograms;
//! - [`mod@bench`], [`pubo`], [`jss`], [`qaoa`]: idle/echo/GHZ benchmark circuits
//!   and LR-QAOA circuits for job-shop load balancing;
//! - [`dist`], [`fit`]: distribution distances and the Boltzmann
//!   maximum-likelihood fits (zeta, optional noise floor delta, likelihood
//!   intervals, best-solution probability, gain ratio);
//! - [`pipeline`]: the whole stack behind one call.
//!
//! Bit order everywhere: qubit 0 is the least significant bit; bitstring keys
//! print MSB-first (qubit 0 rightmost). The `parallel` feature (default)
//! routes the hot loops through rayon; results are identical either way.

pub mod bench;
pub mod circuit;
pub mod counts;
pub mod density;
pub mod dist;
pub mod error;
pub mod fit;
pub mod jss;
pub mod kernel;
pub mod kraus;
pub mod linalg;
pub mod noise_model;
pub mod pipeline;
pub mod pubo;
pub mod qaoa;
pub mod schedule;
pub mod snapshot;
pub mod transpile;
pub mod trajectory;

pub use error::{Error, Result};
