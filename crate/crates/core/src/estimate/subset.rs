use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::budget::{probes_for_subset, shots_for_subset, SampleBudget};
use super::ratio::{ratio, RatioConfig, RatioFlags};
use crate::error::{Error, Result};
use crate::pauli::{all_paulis, cover_trivial, PauliString};
use crate::sim::CbSampler;

/// `|kappa|` assumed when sizing `t` before the run: the length count of
/// a full doubling sequence up to the default cap.
pub const DEFAULT_KAPPA_HINT: usize = 21;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub kappa_hint: usize,
    pub ratio: RatioConfig,
}

impl SubsetConfig {
    /// `ratio.shots` is overwritten by the computed `t`.
    pub fn new(epsilon: f64, delta: f64) -> Self {
        SubsetConfig {
            epsilon,
            delta,
            kappa_hint: DEFAULT_KAPPA_HINT,
            ratio: RatioConfig::new(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetEntry {
    pub pauli: PauliString,
    pub p_hat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseEstimate {
    pub entries: Vec<SubsetEntry>,
    pub x_sample_size: usize,
    pub t: u64,
    pub probes: Vec<PauliString>,
    pub r_hat: Vec<f64>,
    pub flags: Vec<RatioFlags>,
    pub budget: SampleBudget,
}

impl SparseEstimate {
    pub fn p_hat(&self, a: &PauliString) -> Option<f64> {
        self.entries.iter().find(|e| &e.pauli == a).map(|e| e.p_hat)
    }

    /// Mean of `r_hat` over the probes; `p_hat_I = 1 - mean_r_hat`.
    pub fn mean_r_hat(&self) -> f64 {
        self.r_hat.iter().sum::<f64>() / self.r_hat.len().max(1) as f64
    }
}

fn random_pauli<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PauliString {
    let w = n.div_ceil(64).max(1);
    let mut x = vec![0u64; w];
    let mut z = vec![0u64; w];
    for i in 0..w {
        let bits = (n - 64 * i).min(64);
        let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        x[i] = rng.random::<u64>() & mask;
        z[i] = rng.random::<u64>() & mask;
    }
    PauliString::from_words(n, &x, &z)
}

/// `count` distinct Paulis drawn uniformly from `P^n`, or all of `P^n` when
/// `count` reaches its size.
pub fn draw_probes<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<PauliString> {
    let full = if 2 * n < usize::BITS as usize - 1 {
        Some(1usize << (2 * n))
    } else {
        None
    };
    match full {
        Some(size) if count >= size => all_paulis(n).collect(),
        Some(size) if count * 2 > size => {
            let mut all: Vec<PauliString> = all_paulis(n).collect();
            let (head, _) = all.partial_shuffle(rng, count);
            head.to_vec()
        }
        _ => {
            let mut seen = HashSet::with_capacity(count);
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let p = random_pauli(n, rng);
                if seen.insert(p.clone()) {
                    out.push(p);
                }
            }
            out
        }
    }
}

/// `1[a = 0] - mean_{b in X} (-1)^{<a, b>} r_b`.
pub fn signed_average(a: &PauliString, probes: &[PauliString], r: &[f64]) -> f64 {
    let s: f64 = probes.iter().zip(r).map(|(b, &r)| a.sign(b) * r).sum();
    let delta = if a.is_identity() { 1.0 } else { 0.0 };
    delta - s / probes.len().max(1) as f64
}

/// Estimates `p_a` for each `a` in `e_set` from the eigenvalues of a
/// uniformly random probe set.
pub fn estimate_subset<R: Rng + ?Sized>(
    e_set: &[PauliString],
    epsilon: f64,
    delta: f64,
    sampler: &dyn CbSampler,
    rng: &mut R,
) -> Result<SparseEstimate> {
    estimate_subset_with(e_set, &SubsetConfig::new(epsilon, delta), sampler, rng)
}

pub fn estimate_subset_with<R: Rng + ?Sized>(
    e_set: &[PauliString],
    cfg: &SubsetConfig,
    sampler: &dyn CbSampler,
    rng: &mut R,
) -> Result<SparseEstimate> {
    let n = e_set
        .first()
        .map(|p| p.num_qubits())
        .ok_or_else(|| Error::InvalidParameter("empty estimation set".into()))?;
    if let Some(p) = e_set.iter().find(|p| p.num_qubits() != n) {
        return Err(Error::QubitMismatch {
            expected: n,
            found: p.num_qubits(),
        });
    }
    let x_size = probes_for_subset(cfg.epsilon, cfg.delta, e_set.len())? as usize;
    let probes = draw_probes(n, x_size, rng);
    let t = shots_for_subset(cfg.epsilon, cfg.delta, probes.len(), cfg.kappa_hint)?;
    let rcfg = RatioConfig {
        shots: t,
        ..cfg.ratio.clone()
    };
    let out = ratio(&cover_trivial(&probes)?, &probes, &rcfg, sampler)?;
    let r_hat: Vec<f64> = out.estimates.iter().map(|e| e.r_hat).collect();
    let entries = e_set
        .iter()
        .map(|a| SubsetEntry {
            pauli: a.clone(),
            p_hat: signed_average(a, &probes, &r_hat),
        })
        .collect();
    Ok(SparseEstimate {
        entries,
        x_sample_size: probes.len(),
        t,
        flags: out.estimates.iter().map(|e| e.flags).collect(),
        probes,
        r_hat,
        budget: out.budget,
    })
}
