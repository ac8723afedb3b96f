use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::budget::SampleBudget;
use super::ratio::{ratio, RatioConfig};
use super::subset::{draw_probes, signed_average};
use crate::error::{Error, Result};
use crate::pauli::{cover_trivial, Pauli1, PauliString};
use crate::sim::rng::mix;
use crate::sim::CbSampler;

/// Indices of the `s` largest probabilities, ties broken by Pauli order.
pub fn select_top_s(p: &[(PauliString, f64)], s: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| p[b].1.total_cmp(&p[a].1).then_with(|| p[a].0.cmp(&p[b].0)));
    idx.truncate(s);
    idx
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    /// Probes drawn per block and level.
    pub u: usize,
    pub ratio: RatioConfig,
}

/// Spending and sizes of one level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeLevel {
    pub level: usize,
    pub blocks: usize,
    pub probes: usize,
    pub candidates: usize,
    pub budget: SampleBudget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeOutput {
    /// Selected Paulis of the final block with their estimates.
    pub p: Vec<(PauliString, f64)>,
    pub levels: Vec<TreeLevel>,
    pub budget: SampleBudget,
}

impl TreeOutput {
    pub fn p_hat(&self, e: &PauliString) -> Option<f64> {
        self.p.iter().find(|(q, _)| q == e).map(|x| x.1)
    }
}

struct Block {
    qubits: Vec<usize>,
    candidates: Vec<(PauliString, f64)>,
}

/// Number of levels: `ceil(log2 n) + 1`.
fn level_count(n: usize) -> usize {
    (usize::BITS - (n.max(1) - 1).leading_zeros()) as usize + 1
}

/// Builds a sparse model level by level, merging neighbouring blocks of
/// qubits. `select` keeps candidate indices of one block.
pub fn tree_reconstruction<R: Rng + ?Sized>(
    n: usize,
    cfg: &TreeConfig,
    select: &dyn Fn(&[(PauliString, f64)]) -> Vec<usize>,
    sampler: &dyn CbSampler,
    rng: &mut R,
) -> Result<TreeOutput> {
    if cfg.u == 0 {
        return Err(Error::InvalidParameter("u must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let mut blocks: Vec<Block> = (0..n)
        .map(|q| Block {
            qubits: vec![q],
            candidates: Pauli1::ALL
                .iter()
                .map(|&p| (PauliString::single(n, q, p), 0.0))
                .collect(),
        })
        .collect();
    let levels = level_count(n);
    let mut out_levels = Vec::with_capacity(levels);
    let mut total = SampleBudget::default();

    for level in 0..levels {
        let probes: Vec<Vec<PauliString>> = blocks
            .iter()
            .map(|b| {
                draw_probes(b.qubits.len(), cfg.u, rng)
                    .iter()
                    .map(|local| PauliString::embed(local, &b.qubits, n))
                    .collect()
            })
            .collect();
        let mut union: Vec<PauliString> = probes.iter().flatten().cloned().collect();
        union.sort();
        union.dedup();
        let rcfg = RatioConfig {
            experiment_base: mix(&[cfg.ratio.experiment_base, level as u64]),
            ..cfg.ratio.clone()
        };
        let out = ratio(&cover_trivial(&union)?, &union, &rcfg, sampler)?;
        let r: HashMap<&PauliString, f64> = out.estimates.iter().map(|e| (&e.pauli, e.r_hat)).collect();

        let mut candidates = 0;
        for (b, f) in blocks.iter_mut().zip(&probes) {
            let rf: Vec<f64> = f.iter().map(|x| r[x]).collect();
            let p: Vec<(PauliString, f64)> = b
                .candidates
                .iter()
                .map(|(e, _)| (e.clone(), signed_average(e, f, &rf)))
                .collect();
            candidates += p.len();
            let mut keep = select(&p);
            keep.sort_unstable();
            keep.dedup();
            b.candidates = keep.into_iter().filter_map(|i| p.get(i).cloned()).collect();
        }
        total.absorb(&out.budget);
        out_levels.push(TreeLevel {
            level,
            blocks: blocks.len(),
            probes: union.len(),
            candidates,
            budget: out.budget,
        });
        if level + 1 < levels {
            blocks = merge(blocks, cfg.u.saturating_mul(cfg.u));
        }
    }
    debug_assert_eq!(blocks.len(), 1);
    let p = blocks.swap_remove(0).candidates;
    Ok(TreeOutput {
        p,
        levels: out_levels,
        budget: total,
    })
}

/// Pairs neighbouring blocks; candidates become all products, keeping at
/// most `cap` by the product of their estimates.
fn merge(blocks: Vec<Block>, cap: usize) -> Vec<Block> {
    let mut out = Vec::with_capacity(blocks.len().div_ceil(2));
    let mut it = blocks.into_iter();
    while let Some(a) = it.next() {
        let Some(b) = it.next() else {
            out.push(a);
            break;
        };
        let mut candidates: Vec<(PauliString, f64)> = a
            .candidates
            .iter()
            .flat_map(|(x, px)| b.candidates.iter().map(move |(y, py)| (x.mul(y), px * py)))
            .collect();
        if candidates.len() > cap {
            let keep = select_top_s(&candidates, cap);
            candidates = keep.into_iter().map(|i| candidates[i].clone()).collect();
        }
        let mut qubits = a.qubits;
        qubits.extend(b.qubits);
        out.push(Block { qubits, candidates });
    }
    out
}
