use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shots per round and the rounds actually (or predicted to be) spent.
///
/// `kappa` lists the doubling sequence lengths `1, 2, 4, ..`. Every group
/// also runs one reference round at `m = 0`, counted in
/// `reference_rounds`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleBudget {
    pub t: u64,
    pub kappa: Vec<u64>,
    pub rounds: u64,
    pub reference_rounds: u64,
    pub total_measurements: u64,
}

impl SampleBudget {
    /// Merges the spending of independent runs that share `t`.
    pub fn absorb(&mut self, other: &SampleBudget) {
        self.t = self.t.max(other.t);
        for &m in &other.kappa {
            if !self.kappa.contains(&m) {
                self.kappa.push(m);
            }
        }
        self.kappa.sort_unstable();
        self.rounds += other.rounds;
        self.reference_rounds += other.reference_rounds;
        self.total_measurements += other.total_measurements;
    }
}

fn check(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// Ceiling that ignores rounding noise just above an integer.
fn ceil_tol(x: f64) -> u64 {
    (x - 1e-12 * x.abs().max(1.0)).ceil().max(1.0) as u64
}

/// `t = ceil((2/eps^2) ln(2 |X| |kappa| / delta))`.
pub fn shots_for_group(epsilon: f64, delta: f64, x_size: usize, kappa_size: usize) -> Result<u64> {
    check(epsilon, delta)?;
    let arg = 2.0 * x_size.max(1) as f64 * kappa_size.max(1) as f64 / delta;
    Ok(ceil_tol(2.0 / (epsilon * epsilon) * arg.ln()))
}

/// `|X| = ceil((1/eps^2) ln(4 |E| / delta))` random probes.
pub fn probes_for_subset(epsilon: f64, delta: f64, e_size: usize) -> Result<u64> {
    check(epsilon, delta)?;
    Ok(ceil_tol((4.0 * e_size.max(1) as f64 / delta).ln() / (epsilon * epsilon)))
}

/// `t = ceil((1/eps^2) ln(4 |X| |kappa| / delta))`.
pub fn shots_for_subset(epsilon: f64, delta: f64, x_size: usize, kappa_size: usize) -> Result<u64> {
    check(epsilon, delta)?;
    let arg = 4.0 * x_size.max(1) as f64 * kappa_size.max(1) as f64 / delta;
    Ok(ceil_tol(arg.ln() / (epsilon * epsilon)))
}

/// Predicted spending when each of `groups` runs the full doubling sequence
/// of `kappa_size` lengths.
pub fn sample_budget_group(
    epsilon: f64,
    delta: f64,
    x_size: usize,
    kappa_size: usize,
    groups: usize,
) -> Result<SampleBudget> {
    let t = shots_for_group(epsilon, delta, x_size, kappa_size)?;
    let rounds = (kappa_size * groups) as u64;
    let reference_rounds = groups as u64;
    Ok(SampleBudget {
        t,
        kappa: (0..kappa_size as u32).map(|i| 1u64 << i).collect(),
        rounds,
        reference_rounds,
        total_measurements: t * (rounds + reference_rounds),
    })
}
