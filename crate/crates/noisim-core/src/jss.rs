//! Job-shop load balancing as binary optimisation.
//!
//! Jobs with given durations are distributed over identical machines so that
//! the per-machine total processing times are as balanced as possible; the
//! energy is the summed squared deviation from the mean load. Two encodings
//! are provided: one-hot (one variable per job/machine pair, with a penalty
//! enforcing exactly one machine per job) and dense (the machine index of
//! each job in a binary register).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pubo::PuboPolynomial;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JssInstance {
    pub durations: Vec<f64>,
    pub machines: usize,
}

impl JssInstance {
    pub fn new(durations: Vec<f64>, machines: usize) -> Result<Self> {
        if durations.is_empty() {
            return Err(Error::InvalidParameter("need at least one job".into()));
        }
        if machines < 2 {
            return Err(Error::InvalidParameter("need at least two machines".into()));
        }
        if durations.iter().any(|&t| t <= 0.0 || !t.is_finite()) {
            return Err(Error::InvalidParameter(
                "job durations must be positive and finite".into(),
            ));
        }
        Ok(Self { durations, machines })
    }

    pub fn jobs(&self) -> usize {
        self.durations.len()
    }

    /// Mean load per machine.
    pub fn mean_load(&self) -> f64 {
        self.durations.iter().sum::<f64>() / self.machines as f64
    }

    /// Penalty weight that strictly dominates any feasible objective value:
    /// 2 (sum t)^2 / n_m.
    pub fn default_penalty(&self) -> f64 {
        let total: f64 = self.durations.iter().sum();
        2.0 * total * total / self.machines as f64
    }

    /// Bits per job in the dense encoding.
    pub fn register_width(&self) -> usize {
        (self.machines as f64).log2().ceil() as usize
    }
}

/// Fixed duration table used when the caller does not supply one.
pub fn default_durations(jobs: usize) -> Vec<f64> {
    const TABLE: [f64; 8] = [3.0, 1.0, 2.0, 4.0, 5.0, 2.0, 6.0, 3.0];
    (0..jobs).map(|j| TABLE[j % TABLE.len()] + (j / TABLE.len()) as f64).collect()
}

/// One-hot QUBO: variable x_{j,m} (index j * n_m + m) is 1 when job j runs
/// on machine m. Energy = sum_m (L_m - mean)^2 + penalty * sum_j
/// (sum_m x_{j,m} - 1)^2, with L_m the machine load.
pub fn jss_onehot_pubo(instance: &JssInstance, penalty: f64) -> Result<PuboPolynomial> {
    if penalty <= 0.0 || penalty.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "penalty must be positive, got {penalty}"
        )));
    }
    let (jobs, machines) = (instance.jobs(), instance.machines);
    let num_vars = jobs * machines;
    if num_vars > 63 {
        return Err(Error::InvalidParameter(format!(
            "one-hot encoding needs {num_vars} variables; at most 63 supported"
        )));
    }
    let var = |j: usize, m: usize| j * machines + m;
    let mean = instance.mean_load();

    let mut energy = PuboPolynomial::zero(num_vars);
    for m in 0..machines {
        // (sum_j t_j x_{j,m} - mean)^2
        let mut load = PuboPolynomial::zero(num_vars);
        for j in 0..jobs {
            load.add_term(1 << var(j, m), instance.durations[j]);
        }
        load.add_term(0, -mean);
        energy.add_polynomial(&load.multiply(&load));
    }
    for j in 0..jobs {
        // penalty * (sum_m x_{j,m} - 1)^2
        let mut ones = PuboPolynomial::zero(num_vars);
        for m in 0..machines {
            ones.add_term(1 << var(j, m), 1.0);
        }
        ones.add_term(0, -1.0);
        energy.add_polynomial(&ones.multiply(&ones).scaled(penalty));
    }
    Ok(energy)
}

/// Dense PUBO: job j's machine index lives in bits
/// [j * width, (j+1) * width). Register values >= n_m wrap around
/// (value mod n_m), so every bit pattern is a feasible schedule and no
/// penalty terms are needed.
pub fn jss_dense_pubo(instance: &JssInstance) -> Result<PuboPolynomial> {
    let (jobs, machines) = (instance.jobs(), instance.machines);
    let width = instance.register_width();
    let num_vars = jobs * width;
    if num_vars > 63 {
        return Err(Error::InvalidParameter(format!(
            "dense encoding needs {num_vars} variables; at most 63 supported"
        )));
    }
    let mean = instance.mean_load();

    // Indicator polynomial I_{j,m}: 1 iff job j's register selects machine m.
    let indicator = |j: usize, m: usize| -> PuboPolynomial {
        let mut acc = PuboPolynomial::zero(num_vars);
        for value in 0..(1usize << width) {
            if value % machines != m {
                continue;
            }
            // Product over bits of (x_b or (1 - x_b)).
            let mut product = PuboPolynomial::from_terms(num_vars, vec![(vec![], 1.0)])
                .expect("constant term is valid");
            for b in 0..width {
                let v = j * width + b;
                let mut factor = PuboPolynomial::zero(num_vars);
                if (value >> b) & 1 == 1 {
                    factor.add_term(1 << v, 1.0);
                } else {
                    factor.add_term(0, 1.0);
                    factor.add_term(1 << v, -1.0);
                }
                product = product.multiply(&factor);
            }
            acc.add_polynomial(&product);
        }
        acc
    };

    let mut energy = PuboPolynomial::zero(num_vars);
    for m in 0..machines {
        let mut load = PuboPolynomial::zero(num_vars);
        for j in 0..jobs {
            load.add_polynomial(&indicator(j, m).scaled(instance.durations[j]));
        }
        load.add_term(0, -mean);
        energy.add_polynomial(&load.multiply(&load));
    }
    Ok(energy)
}

/// Machine assignment of each job under the one-hot encoding, or `None` for
/// an infeasible bitstring.
pub fn onehot_assignment(instance: &JssInstance, x: u64) -> Option<Vec<usize>> {
    let machines = instance.machines;
    let mut out = Vec::with_capacity(instance.jobs());
    for j in 0..instance.jobs() {
        let mut chosen = None;
        for m in 0..machines {
            if (x >> (j * machines + m)) & 1 == 1 {
                if chosen.is_some() {
                    return None;
                }
                chosen = Some(m);
            }
        }
        out.push(chosen?);
    }
    Some(out)
}

/// Machine assignment of each job under the dense encoding.
pub fn dense_assignment(instance: &JssInstance, x: u64) -> Vec<usize> {
    let width = instance.register_width();
    (0..instance.jobs())
        .map(|j| {
            let value = ((x >> (j * width)) & ((1 << width) - 1)) as usize;
            value % instance.machines
        })
        .collect()
}

/// Canonical machine partition of an assignment: jobs grouped per machine,
/// groups sorted, empty groups dropped. Machine labels are interchangeable,
/// so two assignments with the same partition are the same schedule.
pub fn canonical_partition(assignment: &[usize], machines: usize) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); machines];
    for (job, &m) in assignment.iter().enumerate() {
        groups[m].push(job);
    }
    let mut groups: Vec<Vec<usize>> = groups.into_iter().filter(|g| !g.is_empty()).collect();
    groups.sort();
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_jobs() -> JssInstance {
        JssInstance::new(vec![1.0, 1.0], 2).unwrap()
    }

    #[test]
    fn onehot_minima_are_the_balanced_assignments() {
        let instance = two_jobs();
        let energy = jss_onehot_pubo(&instance, 10.0).unwrap();
        assert_eq!(energy.num_vars, 4);
        assert_eq!(energy.degree(), 2);
        let minima = energy.minimizers(24).unwrap();
        // x_{0,0} = x_{1,1} = 1 (0b1001) or x_{0,1} = x_{1,0} = 1 (0b0110).
        assert_eq!(minima, vec![0b0110, 0b1001]);
    }

    #[test]
    fn onehot_all_zero_assignment_pays_the_penalty() {
        let instance = two_jobs();
        let penalty = 10.0;
        let energy = jss_onehot_pubo(&instance, penalty).unwrap();
        let mean = instance.mean_load();
        let expected = 2.0 * mean * mean + penalty * 2.0;
        assert!((energy.evaluate(0) - expected).abs() < 1e-12);
    }

    #[test]
    fn dense_two_jobs_two_machines() {
        let instance = two_jobs();
        let energy = jss_dense_pubo(&instance).unwrap();
        assert_eq!(energy.num_vars, 2);
        let minima = energy.minimizers(24).unwrap();
        assert_eq!(minima, vec![0b01, 0b10]);
    }

    #[test]
    fn dense_four_jobs_matches_expected_qubit_count() {
        let instance = JssInstance::new(default_durations(4), 2).unwrap();
        let energy = jss_dense_pubo(&instance).unwrap();
        assert_eq!(energy.num_vars, 4);
    }

    #[test]
    fn dense_encoding_is_genuinely_higher_order() {
        // Four machines need 2-bit registers; the cross terms between two
        // jobs' indicators reach degree 4 (a single job collapses, since
        // its indicators sum to one).
        let instance = JssInstance::new(vec![2.0, 1.0], 4).unwrap();
        let energy = jss_dense_pubo(&instance).unwrap();
        assert_eq!(instance.register_width(), 2);
        assert!(energy.degree() > 2, "degree {} not PUBO", energy.degree());
        assert!(energy.degree() <= 2 * instance.register_width());
    }

    #[test]
    fn dense_wraparound_maps_overflow_values() {
        // Three machines need 2 bits; value 3 wraps to machine 0.
        let instance = JssInstance::new(vec![2.0, 1.0, 1.0], 3).unwrap();
        assert_eq!(dense_assignment(&instance, 0b11), vec![0, 0, 0]);
        assert_eq!(dense_assignment(&instance, 0b01_10), vec![2, 1, 0]);
    }

    #[test]
    fn onehot_and_dense_ground_partitions_agree() {
        for jobs in 2..=4usize {
            let instance = JssInstance::new(default_durations(jobs), 2).unwrap();
            let penalty = instance.default_penalty();
            let onehot = jss_onehot_pubo(&instance, penalty).unwrap();
            let dense = jss_dense_pubo(&instance).unwrap();

            let onehot_partitions: std::collections::BTreeSet<_> = onehot
                .minimizers(24)
                .unwrap()
                .into_iter()
                .map(|x| {
                    let assignment = onehot_assignment(&instance, x)
                        .expect("one-hot minima must be feasible under a dominating penalty");
                    canonical_partition(&assignment, instance.machines)
                })
                .collect();
            let dense_partitions: std::collections::BTreeSet<_> = dense
                .minimizers(24)
                .unwrap()
                .into_iter()
                .map(|x| canonical_partition(&dense_assignment(&instance, x), instance.machines))
                .collect();
            assert_eq!(onehot_partitions, dense_partitions, "jobs = {jobs}");

            // Minimum energies agree too: the penalty vanishes on feasible
            // states and both encodings score the same load imbalance.
            let e1 = onehot.ground_state(24).unwrap().energy;
            let e2 = dense.ground_state(24).unwrap().energy;
            assert!((e1 - e2).abs() < 1e-9, "jobs = {jobs}: {e1} vs {e2}");
        }
    }
}
