//! Maximum-likelihood fits of output distributions.
//!
//! The model is exponential in the state energy, p(x) = Z^{-1} e^{-zeta E(x)}
//! with Z(zeta) = sum_x e^{-zeta E(x)}, optionally extended by an additive
//! noise floor: p(x) = Z^{-1} (e^{-zeta E(x)} + delta). The pure model's
//! maximiser solves `<E>_zeta = (1/N) sum_i n_i E(x_i)`; the extended model is
//! maximised numerically. Parameter uncertainties come from the likelihood
//! ratio: the interval edge is where the likelihood drops to 60% of its
//! maximum (treated as one standard deviation).
//!
//! All state-space sums stream over the 2^n states in fixed-size blocks with
//! an ordered final reduction, so results are identical for any thread count.
//! Exponentials are evaluated in the log domain with a max shift.

use serde::Serialize;

use crate::counts::CountsHistogram;
use crate::error::{Error, Result};
use crate::kernel::block_sum2;
use crate::pubo::{PuboPolynomial, DEFAULT_ENUMERATION_LIMIT};

/// One-standard-deviation likelihood ratio.
pub const LIKELIHOOD_RATIO: f64 = 0.60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    /// Set when the ratio never crossed within the scan range on that side.
    pub lo_unbounded: bool,
    pub hi_unbounded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub zeta: f64,
    /// Noise floor; `None` for the pure exponential model.
    pub delta: Option<f64>,
    pub log_likelihood: f64,
    /// Fitted probability of one lowest-energy state.
    pub p_tilde: f64,
    pub zeta_interval: Interval,
    pub delta_interval: Option<Interval>,
    pub log_z: f64,
    pub num_vars: usize,
    pub ground_energy: f64,
    pub ground_degeneracy: u64,
    /// Lowest bitstring among the minimisers.
    pub ground_state: u64,
    pub shots: f64,
}

impl FitResult {
    /// Probability of finding any optimal solution when the minimum is
    /// `degeneracy`-fold degenerate: p0 = degeneracy * p_tilde.
    pub fn optimum_probability(&self) -> f64 {
        self.ground_degeneracy as f64 * self.p_tilde
    }
}

impl Serialize for FitResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("zeta", &self.zeta)?;
        if let Some(delta) = self.delta {
            map.serialize_entry("delta", &delta)?;
        }
        map.serialize_entry("p_tilde", &self.p_tilde)?;
        map.serialize_entry("zeta_ci", &[self.zeta_interval.lo, self.zeta_interval.hi])?;
        if self.zeta_interval.lo_unbounded || self.zeta_interval.hi_unbounded {
            map.serialize_entry(
                "zeta_ci_unbounded",
                &[self.zeta_interval.lo_unbounded, self.zeta_interval.hi_unbounded],
            )?;
        }
        if let Some(ci) = self.delta_interval {
            map.serialize_entry("delta_ci", &[ci.lo, ci.hi])?;
            if ci.lo_unbounded || ci.hi_unbounded {
                map.serialize_entry("delta_ci_unbounded", &[ci.lo_unbounded, ci.hi_unbounded])?;
            }
        }
        map.serialize_entry("log_likelihood", &self.log_likelihood)?;
        map.serialize_entry("n", &self.num_vars)?;
        map.serialize_entry("ground_energy", &self.ground_energy)?;
        map.serialize_entry("ground_degeneracy", &self.ground_degeneracy)?;
        map.end()
    }
}

#[inline]
fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Observed data plus the spectrum facts every likelihood evaluation needs.
pub struct FitProblem<'a> {
    energy: &'a PuboPolynomial,
    observed: Vec<(u64, f64)>,
    obs_energies: Vec<f64>,
    total_weight: f64,
    weighted_energy_sum: f64,
    pub e_min: f64,
    pub e_max: f64,
}

impl<'a> FitProblem<'a> {
    pub fn new(energy: &'a PuboPolynomial, observed: Vec<(u64, f64)>) -> Result<Self> {
        Self::with_limit(energy, observed, DEFAULT_ENUMERATION_LIMIT)
    }

    pub fn with_limit(
        energy: &'a PuboPolynomial,
        observed: Vec<(u64, f64)>,
        limit: usize,
    ) -> Result<Self> {
        if observed.is_empty() {
            return Err(Error::InvalidParameter("no observed states".into()));
        }
        let state_count = energy.state_count();
        if let Some(&(state, _)) = observed.iter().find(|&&(s, _)| s >= state_count) {
            return Err(Error::InvalidParameter(format!(
                "observed state {state} does not fit in {} variables",
                energy.num_vars
            )));
        }
        if observed.iter().any(|&(_, w)| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidParameter("negative or non-finite weight".into()));
        }
        let (e_min, e_max) = energy.spectrum_extremes(limit)?;
        let obs_energies: Vec<f64> = observed.iter().map(|&(s, _)| energy.evaluate(s)).collect();
        let total_weight: f64 = observed.iter().map(|&(_, w)| w).sum();
        if total_weight <= 0.0 {
            return Err(Error::InvalidParameter("total weight is zero".into()));
        }
        let weighted_energy_sum = observed
            .iter()
            .zip(&obs_energies)
            .map(|(&(_, w), &e)| w * e)
            .sum();
        Ok(Self {
            energy,
            observed,
            obs_energies,
            total_weight,
            weighted_energy_sum,
            e_min,
            e_max,
        })
    }

    pub fn empirical_mean(&self) -> f64 {
        self.weighted_energy_sum / self.total_weight
    }

    fn spectrum_scale(&self) -> f64 {
        (self.e_max - self.e_min).max(f64::MIN_POSITIVE)
    }

    /// (log Z(zeta), <E>_zeta) in one streamed pass.
    fn partition_stats(&self, zeta: f64) -> (f64, f64) {
        let shift = if zeta >= 0.0 {
            -zeta * self.e_min
        } else {
            -zeta * self.e_max
        };
        let energy = self.energy;
        let (z, ez) = block_sum2(energy.state_count(), |x| {
            let e = energy.evaluate(x);
            let w = (-zeta * e - shift).exp();
            (w, w * e)
        });
        (shift + z.ln(), ez / z)
    }

    pub fn log_partition(&self, zeta: f64) -> f64 {
        self.partition_stats(zeta).0
    }

    pub fn mean_energy(&self, zeta: f64) -> f64 {
        self.partition_stats(zeta).1
    }

    /// log-likelihood of the pure model (up to the multinomial constant).
    pub fn loglik_pure(&self, zeta: f64) -> f64 {
        let log_z = self.log_partition(zeta);
        -zeta * self.weighted_energy_sum - self.total_weight * log_z
    }

    /// log-likelihood of the noise-floor model; -inf outside delta >= 0.
    pub fn loglik(&self, zeta: f64, delta: f64) -> f64 {
        if delta < 0.0 || !delta.is_finite() || !zeta.is_finite() {
            return f64::NEG_INFINITY;
        }
        if delta == 0.0 {
            return self.loglik_pure(zeta);
        }
        let ln_delta = delta.ln();
        let log_z = log_add_exp(
            self.log_partition(zeta),
            ln_delta + self.energy.num_vars as f64 * std::f64::consts::LN_2,
        );
        let mut acc = 0.0;
        for (&(_, w), &e) in self.observed.iter().zip(&self.obs_energies) {
            acc += w * log_add_exp(-zeta * e, ln_delta);
        }
        acc - self.total_weight * log_z
    }

    /// Profile likelihood in zeta: the noise floor re-optimised at fixed zeta.
    fn profile_zeta(&self, zeta: f64, delta_hint: f64) -> f64 {
        let hi = (delta_hint * 10.0).max(1.0);
        let (_, best) = maximize_with_expansion(|d| self.loglik(zeta, d), 0.0, hi, 1e9);
        best
    }

    /// Profile likelihood in delta: zeta re-optimised at fixed delta.
    fn profile_delta(&self, delta: f64, zeta_hint: f64) -> f64 {
        let scale = 1.0 / self.spectrum_scale();
        let width = (zeta_hint.abs() + scale) * 4.0;
        let (_, best) = maximize_with_expansion(
            |z| self.loglik(z, delta),
            zeta_hint - width,
            zeta_hint + width,
            1e9 * scale.max(1.0),
        );
        best
    }
}

/// Golden-section maximisation with bracket expansion when the optimum sits
/// at the upper edge.
fn maximize_with_expansion<F: Fn(f64) -> f64>(f: F, lo: f64, mut hi: f64, cap: f64) -> (f64, f64) {
    loop {
        let (x, v) = golden_max(&f, lo, hi, 160);
        if x < lo + 0.95 * (hi - lo) || hi >= cap {
            return (x, v);
        }
        hi = (hi * 4.0).min(cap);
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// Boltzmann-weighted mean energy over the full state space.
pub fn mean_energy_at_zeta(energy: &PuboPolynomial, zeta: f64) -> Result<f64> {
    if !zeta.is_finite() {
        return Err(Error::InvalidParameter("zeta must be finite".into()));
    }
    let observed = vec![(0u64, 1.0)];
    let problem = FitProblem::new(energy, observed)?;
    Ok(problem.mean_energy(zeta))
}

fn observed_from_counts(
    energy: &PuboPolynomial,
    counts: &CountsHistogram,
) -> Result<Vec<(u64, f64)>> {
    if counts.num_bits != energy.num_vars {
        return Err(Error::DimensionMismatch(counts.num_bits, energy.num_vars));
    }
    if counts.shots == 0 {
        return Err(Error::InvalidParameter("empty histogram".into()));
    }
    Ok(counts.weighted_states())
}

/// (state, weight) pairs from an exact distribution, scaled to an effective
/// shot count (the weight total sets the sharpness of the intervals).
pub fn weights_from_distribution(probs: &[f64], effective_shots: f64) -> Vec<(u64, f64)> {
    probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, &p)| (i as u64, p * effective_shots))
        .collect()
}

/// Fit the pure exponential model by solving `<E>_zeta` = empirical mean.
pub fn fit_zeta(energy: &PuboPolynomial, counts: &CountsHistogram) -> Result<FitResult> {
    fit_zeta_weighted(energy, observed_from_counts(energy, counts)?)
}

pub fn fit_zeta_weighted(energy: &PuboPolynomial, observed: Vec<(u64, f64)>) -> Result<FitResult> {
    let problem = FitProblem::new(energy, observed)?;
    let scale = problem.spectrum_scale();
    if scale <= 1e-12 * problem.e_max.abs().max(1.0) {
        return Err(Error::DegenerateSpectrum);
    }
    let mean = problem.empirical_mean();
    if mean <= problem.e_min || mean >= problem.e_max {
        return Err(Error::OutOfRange {
            mean,
            min: problem.e_min,
            max: problem.e_max,
        });
    }

    // <E>_zeta decreases strictly from e_max to e_min; bracket and bisect.
    let step = 1.0 / scale;
    let mut lo = -step;
    let mut hi = step;
    for _ in 0..200 {
        if problem.mean_energy(lo) >= mean {
            break;
        }
        lo *= 2.0;
    }
    for _ in 0..200 {
        if problem.mean_energy(hi) <= mean {
            break;
        }
        hi *= 2.0;
    }
    for _ in 0..200 {
        if (hi - lo).abs() <= 1e-14 * (lo.abs().max(hi.abs()).max(step)) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if problem.mean_energy(mid) > mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let zeta = 0.5 * (lo + hi);

    let log_z = problem.log_partition(zeta);
    let ground = energy.ground_state(DEFAULT_ENUMERATION_LIMIT)?;
    let log_likelihood = problem.loglik_pure(zeta);
    let zeta_interval = ratio_interval(
        |z| problem.loglik_pure(z),
        zeta,
        log_likelihood,
        (zeta.abs()).max(1.0 / scale),
        &IntervalConfig::default(),
        None,
    );
    Ok(FitResult {
        zeta,
        delta: None,
        log_likelihood,
        p_tilde: (-zeta * ground.energy - log_z).exp(),
        zeta_interval,
        delta_interval: None,
        log_z,
        num_vars: energy.num_vars,
        ground_energy: ground.energy,
        ground_degeneracy: ground.degeneracy,
        ground_state: ground.state,
        shots: problem.total_weight,
    })
}

const NM_MAX_ITER: usize = 2000;

/// Fit the noise-floor model by a deterministic simplex search started from
/// the pure fit plus four fixed restarts.
pub fn fit_zeta_delta(energy: &PuboPolynomial, counts: &CountsHistogram) -> Result<FitResult> {
    fit_zeta_delta_weighted(energy, observed_from_counts(energy, counts)?)
}

pub fn fit_zeta_delta_weighted(
    energy: &PuboPolynomial,
    observed: Vec<(u64, f64)>,
) -> Result<FitResult> {
    let problem = FitProblem::new(energy, observed.clone())?;
    let scale = problem.spectrum_scale();
    if scale <= 1e-12 * problem.e_max.abs().max(1.0) {
        return Err(Error::DegenerateSpectrum);
    }
    let zeta0 = fit_zeta_weighted(energy, observed).map(|r| r.zeta).unwrap_or(0.0);
    let zscale = zeta0.abs().max(1.0 / scale);

    // The floor is optimised as delta = d^2, which keeps the search
    // unconstrained and smooth at the delta = 0 boundary.
    let starts: [(f64, f64); 5] = [
        (zeta0, 0.0),
        (zeta0, 1e-3),
        (0.5 * zeta0, 1e-2),
        (1.5 * zeta0 + 0.1 * zscale, 1e-4),
        (0.0, 0.1),
    ];
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut any_converged = false;
    for &(z, d) in &starts {
        let (x, value, converged) = nelder_mead_max(
            |p| problem.loglik(p[0], p[1] * p[1]),
            &[z, d.sqrt()],
            &[0.1 * zscale, 0.05],
            NM_MAX_ITER,
        );
        any_converged |= converged;
        if converged && best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((x, value));
        }
    }
    if !any_converged {
        return Err(Error::NonConvergence(NM_MAX_ITER));
    }
    let (point, log_likelihood) = best.expect("at least one converged start");
    let (zeta, delta) = (point[0], point[1] * point[1]);

    let ln_delta = if delta > 0.0 { delta.ln() } else { f64::NEG_INFINITY };
    let log_z = log_add_exp(
        problem.log_partition(zeta),
        ln_delta + energy.num_vars as f64 * std::f64::consts::LN_2,
    );
    let ground = energy.ground_state(DEFAULT_ENUMERATION_LIMIT)?;
    let p_tilde = (log_add_exp(-zeta * ground.energy, ln_delta) - log_z).exp();

    let config = IntervalConfig::default();
    let zeta_interval = ratio_interval(
        |z| problem.profile_zeta(z, delta),
        zeta,
        log_likelihood,
        zscale,
        &config,
        None,
    );
    let delta_interval = ratio_interval(
        |d| problem.profile_delta(d, zeta),
        delta,
        log_likelihood,
        delta.max(1e-3),
        &config,
        Some(0.0),
    );
    Ok(FitResult {
        zeta,
        delta: Some(delta),
        log_likelihood,
        p_tilde,
        zeta_interval,
        delta_interval: Some(delta_interval),
        log_z,
        num_vars: energy.num_vars,
        ground_energy: ground.energy,
        ground_degeneracy: ground.degeneracy,
        ground_state: ground.state,
        shots: problem.total_weight,
    })
}

/// Scan settings for the likelihood-ratio intervals.
#[derive(Debug, Clone, Copy)]
pub struct IntervalConfig {
    pub ratio: f64,
    /// Give up (flag unbounded) past this many scale units from the optimum.
    pub max_scale_multiples: f64,
    pub bisect_iters: usize,
}

impl Default for IntervalConfig {
    fn default() -> Self {
        Self {
            ratio: LIKELIHOOD_RATIO,
            max_scale_multiples: 1e4,
            bisect_iters: 100,
        }
    }
}

/// Walk outward from the maximum until the likelihood ratio drops below
/// `config.ratio`, then bisect the crossing. `floor` clips the lower scan
/// (for parameters bounded below, like the noise floor).
pub fn ratio_interval<F: Fn(f64) -> f64>(
    profile: F,
    center: f64,
    l_max: f64,
    scale: f64,
    config: &IntervalConfig,
    floor: Option<f64>,
) -> Interval {
    let threshold = l_max + config.ratio.ln();
    let scan_limit = config.max_scale_multiples * scale;

    let side = |direction: f64| -> (f64, bool) {
        let mut step = 0.05 * scale;
        let mut inner = center;
        loop {
            let mut candidate = center + direction * step;
            let mut clipped = false;
            if let Some(fl) = floor {
                if direction < 0.0 && candidate < fl {
                    candidate = fl;
                    clipped = true;
                }
            }
            if profile(candidate) < threshold {
                // Crossing between inner and candidate; bisect.
                let (mut a, mut b) = (inner, candidate);
                for _ in 0..config.bisect_iters {
                    let mid = 0.5 * (a + b);
                    if profile(mid) >= threshold {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                return (0.5 * (a + b), false);
            }
            if clipped {
                // Bounded by the domain edge, still above the threshold.
                return (candidate, false);
            }
            if (candidate - center).abs() >= scan_limit {
                return (candidate, true);
            }
            inner = candidate;
            step *= 2.0;
        }
    };

    let (lo, lo_unbounded) = side(-1.0);
    let (hi, hi_unbounded) = side(1.0);
    Interval {
        lo: lo.min(center),
        hi: hi.max(center),
        lo_unbounded,
        hi_unbounded,
    }
}

/// Which fitted parameter an interval is asked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitParam {
    Zeta,
    Delta,
}

/// Recompute the likelihood-ratio interval of one parameter of a finished
/// fit under a custom scan configuration. For the noise-floor model the
/// other parameter is re-optimised (profiled) at every scan point.
pub fn likelihood_interval(
    energy: &PuboPolynomial,
    observed: Vec<(u64, f64)>,
    fit: &FitResult,
    param: FitParam,
    config: &IntervalConfig,
) -> Result<Interval> {
    let problem = FitProblem::new(energy, observed)?;
    let zscale = fit.zeta.abs().max(1.0 / problem.spectrum_scale());
    match (param, fit.delta) {
        (FitParam::Zeta, None) => Ok(ratio_interval(
            |z| problem.loglik_pure(z),
            fit.zeta,
            fit.log_likelihood,
            zscale,
            config,
            None,
        )),
        (FitParam::Zeta, Some(delta)) => Ok(ratio_interval(
            |z| problem.profile_zeta(z, delta),
            fit.zeta,
            fit.log_likelihood,
            zscale,
            config,
            None,
        )),
        (FitParam::Delta, None) => Err(Error::InvalidParameter(
            "the pure exponential fit has no noise-floor parameter".into(),
        )),
        (FitParam::Delta, Some(delta)) => Ok(ratio_interval(
            |d| problem.profile_delta(d, fit.zeta),
            delta,
            fit.log_likelihood,
            delta.max(1e-3),
            config,
            Some(0.0),
        )),
    }
}

/// Surviving fraction of the algorithm's advantage over uniform guessing:
/// r = (p_noisy - p0) / (p_noiseless - p0) with p0 = 2^{-n}.
pub fn gain_ratio(p_tilde_noisy: f64, p_tilde_noiseless: f64, num_vars: usize) -> Result<f64> {
    let uniform = 0.5f64.powi(num_vars as i32);
    let denom = p_tilde_noiseless - uniform;
    if denom <= 0.0 {
        return Err(Error::DenominatorNonpositive {
            p_tilde: p_tilde_noiseless,
            uniform,
        });
    }
    Ok((p_tilde_noisy - uniform) / denom)
}

// --- Nelder-Mead -------------------------------------------------------------

/// Deterministic simplex maximisation. Returns (best point, best value,
/// converged).
fn nelder_mead_max<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    steps: &[f64],
    max_iter: usize,
) -> (Vec<f64>, f64, bool) {
    let dim = start.len();
    let neg = |x: &[f64]| -f(x);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), neg(start)));
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += if steps[i] != 0.0 { steps[i] } else { 1e-3 };
        let v = neg(&p);
        simplex.push((p, v));
    }

    let scale: Vec<f64> = steps
        .iter()
        .zip(start)
        .map(|(&s, &x)| s.abs().max(x.abs()).max(1e-12))
        .collect();
    let mut converged = false;
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let diameter_small = (0..dim).all(|k| {
            let lo = simplex.iter().map(|(p, _)| p[k]).fold(f64::INFINITY, f64::min);
            let hi = simplex.iter().map(|(p, _)| p[k]).fold(f64::NEG_INFINITY, f64::max);
            hi - lo <= 1e-10 * scale[k]
        });
        if best.is_finite() && ((worst - best).abs() <= 1e-11 * (best.abs() + 1.0) || diameter_small)
        {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|(p, _)| p[k]).sum::<f64>() / dim as f64)
            .collect();
        let at = |t: f64| -> Vec<f64> {
            (0..dim)
                .map(|k| centroid[k] + t * (centroid[k] - simplex[dim].0[k]))
                .collect()
        };
        let reflected = at(1.0);
        let fr = neg(&reflected);
        if fr < simplex[0].1 {
            let expanded = at(2.0);
            let fe = neg(&expanded);
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            let contracted = if fr < simplex[dim].1 { at(0.5) } else { at(-0.5) };
            let fc = neg(&contracted);
            if fc < simplex[dim].1.min(fr) {
                simplex[dim] = (contracted, fc);
            } else {
                // Shrink towards the best vertex.
                let anchor = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (slot, &base) in entry.0.iter_mut().zip(&anchor) {
                        *slot = base + 0.5 * (*slot - base);
                    }
                    entry.1 = neg(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0.clone(), -simplex[0].1, converged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counts::sample_counts;

    fn two_level() -> PuboPolynomial {
        // E(x0) = x0 over one variable: energies {0, 1}.
        PuboPolynomial::from_terms(1, vec![(vec![0], 1.0)]).unwrap()
    }

    fn counts_from(pairs: &[(u64, u64)], num_bits: usize) -> CountsHistogram {
        let mut histogram = CountsHistogram::new(num_bits);
        for &(state, count) in pairs {
            for _ in 0..count {
                histogram.record(state);
            }
        }
        histogram
    }

    #[test]
    fn mean_energy_limits() {
        let e = two_level();
        // zeta = 0: arithmetic mean.
        assert!((mean_energy_at_zeta(&e, 0.0).unwrap() - 0.5).abs() < 1e-12);
        // Closed form 1 / (1 + e^zeta).
        for zeta in [-2.0f64, -0.3, 0.7, 3.0] {
            let expected = 1.0 / (1.0 + zeta.exp());
            assert!((mean_energy_at_zeta(&e, zeta).unwrap() - expected).abs() < 1e-12);
        }
        // Large zeta approaches the minimum.
        assert!(mean_energy_at_zeta(&e, 50.0).unwrap() < 1e-6);
    }

    #[test]
    fn two_level_analytic_fit() {
        let counts = counts_from(&[(0, 75), (1, 25)], 1);
        let fit = fit_zeta(&two_level(), &counts).unwrap();
        assert!((fit.zeta - 3.0f64.ln()).abs() < 1e-6);
        // p_tilde = e^0 / (1 + 1/3) = 0.75.
        assert!((fit.p_tilde - 0.75).abs() < 1e-9);
        assert!(fit.zeta_interval.lo < fit.zeta && fit.zeta < fit.zeta_interval.hi);
    }

    #[test]
    fn uniform_counts_give_zero_zeta() {
        let e = PuboPolynomial::from_terms(2, vec![(vec![0], 1.0), (vec![1], 2.0)]).unwrap();
        let mut counts = CountsHistogram::new(2);
        for state in 0..4 {
            for _ in 0..250 {
                counts.record(state);
            }
        }
        let fit = fit_zeta(&e, &counts).unwrap();
        assert!(fit.zeta.abs() < 1e-9);
    }

    #[test]
    fn boltzmann_exact_counts_recover_the_generating_zeta() {
        let e = PuboPolynomial::from_terms(
            3,
            vec![(vec![0], 1.0), (vec![1], 0.5), (vec![0, 2], -0.7), (vec![2], 2.0)],
        )
        .unwrap();
        for zeta0 in [-1.2, 0.35, 2.0] {
            let probs: Vec<f64> = (0..8).map(|x| (-zeta0 * e.evaluate(x)).exp()).collect();
            let z: f64 = probs.iter().sum();
            let observed: Vec<(u64, f64)> = probs
                .iter()
                .enumerate()
                .map(|(i, p)| (i as u64, 1e4 * p / z))
                .collect();
            let fit = fit_zeta_weighted(&e, observed).unwrap();
            assert!(
                (fit.zeta - zeta0).abs() < 1e-9,
                "zeta0 = {zeta0}, recovered {}",
                fit.zeta
            );
        }
    }

    #[test]
    fn out_of_range_and_degenerate_errors() {
        let counts = counts_from(&[(0, 10)], 1);
        assert!(matches!(
            fit_zeta(&two_level(), &counts),
            Err(Error::OutOfRange { .. })
        ));
        let flat = PuboPolynomial::from_terms(1, vec![(vec![], 4.0)]).unwrap();
        let counts = counts_from(&[(0, 5), (1, 5)], 1);
        assert!(matches!(
            fit_zeta(&flat, &counts),
            Err(Error::DegenerateSpectrum)
        ));
    }

    #[test]
    fn scale_covariance_of_the_pure_model() {
        let e = PuboPolynomial::from_terms(3, vec![(vec![0], 1.0), (vec![1, 2], 2.0)]).unwrap();
        let counts = counts_from(&[(0, 500), (1, 250), (6, 125), (7, 125)], 3);
        let fit1 = fit_zeta(&e, &counts).unwrap();
        let scaled = e.scaled(3.0);
        let fit2 = fit_zeta(&scaled, &counts).unwrap();
        assert!((fit2.zeta - fit1.zeta / 3.0).abs() < 1e-6 * fit1.zeta.abs());
        assert!((fit2.p_tilde - fit1.p_tilde).abs() < 1e-9);
    }

    #[test]
    fn delta_model_never_loses_to_the_pure_model() {
        let e = PuboPolynomial::from_terms(
            4,
            vec![(vec![0], 1.0), (vec![1], 1.5), (vec![2, 3], 2.0), (vec![3], 0.25)],
        )
        .unwrap();
        let probs: Vec<f64> = (0..16).map(|x| (-0.8 * e.evaluate(x)).exp() + 0.02).collect();
        let z: f64 = probs.iter().sum();
        let normalized: Vec<f64> = probs.iter().map(|p| p / z).collect();
        let counts = sample_counts(&normalized, 4, 20_000, 99).unwrap();
        let pure = fit_zeta(&e, &counts).unwrap();
        let extended = fit_zeta_delta(&e, &counts).unwrap();
        assert!(extended.log_likelihood >= pure.log_likelihood - 1e-9);
        assert!(extended.delta.unwrap() > 0.0);
    }

    #[test]
    fn pure_boltzmann_data_recovers_near_zero_delta() {
        let e = PuboPolynomial::from_terms(3, vec![(vec![0], 0.9), (vec![1], 1.7), (vec![2], 0.4)])
            .unwrap();
        let probs: Vec<f64> = (0..8).map(|x| (-1.1 * e.evaluate(x)).exp()).collect();
        let z: f64 = probs.iter().sum();
        let observed: Vec<(u64, f64)> = probs
            .iter()
            .enumerate()
            .map(|(i, p)| (i as u64, 1e5 * p / z))
            .collect();
        let fit = fit_zeta_delta_weighted(&e, observed).unwrap();
        assert!(fit.delta.unwrap() <= 1e-3, "delta = {:?}", fit.delta);
        assert!(
            fit.zeta_interval.lo <= 1.1 && 1.1 <= fit.zeta_interval.hi,
            "true zeta outside interval {:?}",
            fit.zeta_interval
        );
    }

    #[test]
    fn uniform_counts_under_delta_model_approach_uniform_p_tilde() {
        let e = PuboPolynomial::from_terms(3, vec![(vec![0], 1.0), (vec![1], 2.0), (vec![2], 3.0)])
            .unwrap();
        let mut counts = CountsHistogram::new(3);
        for state in 0..8 {
            for _ in 0..1000 {
                counts.record(state);
            }
        }
        let fit = fit_zeta_delta(&e, &counts).unwrap();
        let uniform = 1.0 / 8.0;
        assert!(
            (fit.p_tilde - uniform).abs() <= 0.1 * uniform,
            "p_tilde {} vs uniform {uniform}",
            fit.p_tilde
        );
    }

    #[test]
    fn gaussian_fixture_crossing_sits_at_one_sigma() {
        // exp(-x^2 / 2): the 0.6 ratio crossing is sqrt(-2 ln 0.6) sigma.
        let profile = |x: f64| -0.5 * x * x;
        let interval = ratio_interval(profile, 0.0, 0.0, 1.0, &IntervalConfig::default(), None);
        let expected = (-2.0 * LIKELIHOOD_RATIO.ln()).sqrt();
        assert!((interval.hi - expected).abs() < 1e-3);
        assert!((interval.lo + expected).abs() < 1e-3);
        assert!((expected - 1.0108).abs() < 1e-4);
    }

    #[test]
    fn recomputed_interval_matches_the_fit_and_respects_scan_limits() {
        let counts = counts_from(&[(0, 75), (1, 25)], 1);
        let fit = fit_zeta(&two_level(), &counts).unwrap();
        let again = likelihood_interval(
            &two_level(),
            counts.weighted_states(),
            &fit,
            FitParam::Zeta,
            &IntervalConfig::default(),
        )
        .unwrap();
        assert!((again.lo - fit.zeta_interval.lo).abs() < 1e-9);
        assert!((again.hi - fit.zeta_interval.hi).abs() < 1e-9);
        // A scan range too narrow to reach the 0.60 crossing is flagged.
        let narrow = IntervalConfig {
            max_scale_multiples: 1e-4,
            ..IntervalConfig::default()
        };
        let clipped = likelihood_interval(
            &two_level(),
            counts.weighted_states(),
            &fit,
            FitParam::Zeta,
            &narrow,
        )
        .unwrap();
        assert!(clipped.lo_unbounded && clipped.hi_unbounded);
        // The pure model has no delta to profile.
        assert!(likelihood_interval(
            &two_level(),
            counts.weighted_states(),
            &fit,
            FitParam::Delta,
            &IntervalConfig::default(),
        )
        .is_err());
    }

    #[test]
    fn narrow_scan_range_flags_unbounded() {
        let profile = |_x: f64| 0.0; // perfectly flat likelihood
        let config = IntervalConfig {
            max_scale_multiples: 2.0,
            ..IntervalConfig::default()
        };
        let interval = ratio_interval(profile, 0.0, 0.0, 1.0, &config, None);
        assert!(interval.lo_unbounded && interval.hi_unbounded);
    }

    #[test]
    fn interval_width_shrinks_with_shot_count() {
        let e = two_level();
        let mut widths = Vec::new();
        for &shots in &[1_000u64, 10_000, 100_000] {
            let n1 = (shots as f64 * 0.25).round() as u64;
            let counts = counts_from(&[(0, shots - n1), (1, n1)], 1);
            let fit = fit_zeta(&e, &counts).unwrap();
            widths.push(fit.zeta_interval.hi - fit.zeta_interval.lo);
        }
        // Asymptotically 1/sqrt(N): each decade shrinks by sqrt(10).
        for w in widths.windows(2) {
            let shrink = w[0] / w[1];
            assert!(
                (shrink - 10f64.sqrt()).abs() < 0.2 * 10f64.sqrt(),
                "shrink factor {shrink}"
            );
        }
    }

    #[test]
    fn gain_ratio_limits() {
        assert!((gain_ratio(0.5, 0.5, 4).unwrap() - 1.0).abs() < 1e-12);
        assert!(gain_ratio(0.0625, 0.5, 4).unwrap().abs() < 1e-12);
        assert!((gain_ratio(0.28125, 0.5, 4).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(
            gain_ratio(0.1, 0.0625, 4),
            Err(Error::DenominatorNonpositive { .. })
        ));
    }

    #[test]
    fn optimum_probability_uses_the_degeneracy() {
        let counts = counts_from(&[(0, 75), (1, 25)], 1);
        let fit = fit_zeta(&two_level(), &counts).unwrap();
        assert_eq!(fit.ground_degeneracy, 1);
        assert!((fit.optimum_probability() - fit.p_tilde).abs() < 1e-15);
    }

    #[test]
    fn fit_report_json_has_the_expected_fields() {
        let counts = counts_from(&[(0, 75), (1, 25)], 1);
        let fit = fit_zeta(&two_level(), &counts).unwrap();
        let value: serde_json::Value = serde_json::to_value(&fit).unwrap();
        for key in ["zeta", "p_tilde", "zeta_ci", "log_likelihood", "n", "ground_energy", "ground_degeneracy"] {
            assert!(value.get(key).is_some(), "missing {key}");
        }
        assert!(value.get("delta").is_none());
    }
}
