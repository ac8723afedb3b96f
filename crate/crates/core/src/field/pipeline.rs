use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bounds::{plug_in_diagnostics, BoundDiagnostics};
use super::canonical::{canonical_potentials, CanonicalEstimate};
use super::graph::{independent_set_schedule, FactorGraph};
use super::table::LocalMarginal;
use crate::channel::f_to_p_projected;
use crate::error::{Error, Result};
use crate::estimate::{
    estimate_subset_with, ratio, shots_for_group, RatioConfig, SampleBudget, Schedule, SubsetConfig,
    DEFAULT_KAPPA_HINT,
};
use crate::pauli::{cover_mub_group, PauliGroup, PauliString, StabilizerCovering, StabilizerGroup};
use crate::sim::rng::mix;
use crate::sim::CbSampler;

/// Default cap on closure size; a closure of 6 qubits has 4096 elements.
pub const DEFAULT_NU_BAR_CAP: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub kappa_hint: usize,
    /// Ratio settings; `shots` is replaced by the computed `t`.
    pub ratio: RatioConfig,
    /// Estimate disjoint closures from shared experiments.
    pub batched: bool,
    pub nu_bar_cap: usize,
    /// Estimate `p(0)` with the subset estimator on `{I}`.
    pub normalizer: bool,
}

impl PipelineConfig {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        PipelineConfig {
            epsilon,
            delta,
            kappa_hint: DEFAULT_KAPPA_HINT,
            ratio: RatioConfig::new(1),
            batched: true,
            nu_bar_cap: DEFAULT_NU_BAR_CAP,
            normalizer: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub estimate: CanonicalEstimate,
    /// Estimated marginal on each factor's closure, in factor order.
    pub marginals: Vec<LocalMarginal>,
    pub diagnostics: BoundDiagnostics,
    pub batches: Vec<Vec<usize>>,
    pub t: u64,
    pub budget: SampleBudget,
}

/// Serialized form of an estimated field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldDump {
    pub log_phi: BTreeMap<String, Vec<f64>>,
    pub p0_hat: Option<f64>,
    pub diagnostics: BoundDiagnostics,
}

impl From<&PipelineOutput> for FieldDump {
    fn from(o: &PipelineOutput) -> Self {
        FieldDump {
            log_phi: o.estimate.log_phi_map(),
            p0_hat: o.estimate.p0_hat,
            diagnostics: o.diagnostics.clone(),
        }
    }
}

/// Estimates the marginal on every factor closure. Closures in one batch
/// must be disjoint; they are measured together with covering groups
/// that are direct sums of the per-closure covers.
pub fn estimate_closure_marginals(
    graph: &FactorGraph,
    batches: &[Vec<usize>],
    cfg: &RatioConfig,
    sampler: &dyn CbSampler,
) -> Result<(Vec<LocalMarginal>, SampleBudget)> {
    let n = graph.num_vars();
    let mut out: Vec<Option<LocalMarginal>> = vec![None; graph.num_factors()];
    let mut budget = SampleBudget::default();
    for (b, batch) in batches.iter().enumerate() {
        let closures: Vec<Vec<usize>> = batch.iter().map(|&k| graph.factor_closure(k)).collect();
        let groups: Vec<PauliGroup> = closures.iter().map(|c| PauliGroup::on_qubits(n, c)).collect();
        let covers = groups.iter().map(cover_mub_group).collect::<Result<Vec<_>>>()?;
        let width = covers.iter().map(|c| c.len()).max().unwrap_or(0);
        let combined = (0..width)
            .map(|j| {
                let gens = covers
                    .iter()
                    .filter_map(|c| c.groups.get(j))
                    .flat_map(|g| g.generators().iter().cloned())
                    .collect();
                StabilizerGroup::new(n, gens)
            })
            .collect::<Result<Vec<_>>>()?;
        let cover = StabilizerCovering { groups: combined };
        let elements: Vec<Vec<PauliString>> = groups
            .iter()
            .map(|g| (0..1usize << g.rank()).map(|c| g.element(c)).collect())
            .collect();
        let mut xs: Vec<PauliString> = elements.iter().flatten().cloned().collect();
        xs.sort();
        xs.dedup();
        let rcfg = RatioConfig {
            schedule: Schedule::SharedKappa,
            experiment_base: mix(&[cfg.experiment_base, b as u64]),
            ..cfg.clone()
        };
        let res = ratio(&cover, &xs, &rcfg, sampler)?;
        let r: HashMap<&PauliString, f64> = res.estimates.iter().map(|e| (&e.pauli, e.r_hat)).collect();
        for (i, &k) in batch.iter().enumerate() {
            let f_hat: Vec<f64> = elements[i].iter().map(|x| 1.0 - r[x]).collect();
            let marginal = f_to_p_projected(&groups[i], &f_hat)?;
            out[k] = Some(LocalMarginal::new(closures[i].clone(), marginal.to_local_table(&closures[i]))?);
        }
        budget.absorb(&res.budget);
    }
    let marginals = out
        .into_iter()
        .enumerate()
        .map(|(k, m)| m.ok_or(Error::MissingMarginal(k)))
        .collect::<Result<_>>()?;
    Ok((marginals, budget))
}

/// Closure marginals, canonical potentials and plug-in diagnostics.
pub fn canonical_estimator_pipeline<R: Rng + ?Sized>(
    graph: &FactorGraph,
    cfg: &PipelineConfig,
    sampler: &dyn CbSampler,
    rng: &mut R,
) -> Result<PipelineOutput> {
    let nu_bar = graph.nu_bar();
    if nu_bar > cfg.nu_bar_cap {
        return Err(Error::CapExceeded {
            what: "closure size",
            value: nu_bar,
            cap: cfg.nu_bar_cap,
        });
    }
    let n_f = graph.num_factors();
    let x_size = (1usize << (2 * nu_bar)) - 1;
    let t = shots_for_group(cfg.epsilon, cfg.delta / n_f.max(1) as f64, x_size, cfg.kappa_hint)?;
    let batches = if cfg.batched {
        independent_set_schedule(graph)
    } else {
        (0..n_f).map(|k| vec![k]).collect()
    };
    let rcfg = RatioConfig {
        shots: t,
        ..cfg.ratio.clone()
    };
    let (marginals, mut budget) = estimate_closure_marginals(graph, &batches, &rcfg, sampler)?;
    let mut estimate = canonical_potentials(graph, &marginals)?;
    let r_star_hat = marginals
        .iter()
        .map(|m| (1.0 - m.table[0]).max(m.table.iter().skip(1).copied().fold(0.0, f64::max)))
        .fold(0.0, f64::max);
    let diagnostics = plug_in_diagnostics(graph, &marginals, cfg.epsilon * r_star_hat)?;
    if cfg.normalizer {
        let e = [PauliString::identity(graph.num_vars())];
        let mut scfg = SubsetConfig::new(cfg.epsilon, cfg.delta);
        scfg.kappa_hint = cfg.kappa_hint;
        scfg.ratio = RatioConfig {
            experiment_base: mix(&[cfg.ratio.experiment_base, u64::MAX]),
            ..cfg.ratio.clone()
        };
        let s = estimate_subset_with(&e, &scfg, sampler, rng)?;
        estimate.p0_hat = Some(s.entries[0].p_hat);
        budget.absorb(&s.budget);
    }
    Ok(PipelineOutput {
        estimate,
        marginals,
        diagnostics,
        batches,
        t,
        budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::PauliChannel;
    use crate::sim::{ExactSampler, NoiseModel};
    use rand::SeedableRng;

    #[test]
    fn noiseless_chain_gives_identity() {
        let g = FactorGraph::chain(5).unwrap();
        let s = ExactSampler::new(NoiseModel::ideal_spam(PauliChannel::identity(5)));
        let mut cfg = PipelineConfig::new(0.2, 0.1);
        cfg.ratio.m_cap = 4;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let out = canonical_estimator_pipeline(&g, &cfg, &s, &mut rng).unwrap();
        let q = out.estimate.normalized_dense().unwrap();
        // only the r_floor sentinel is left off the identity
        assert!((q[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn batched_and_serial_agree_with_exact_sampler() {
        let g = FactorGraph::chain(9).unwrap();
        let ch = PauliChannel::depolarizing_product(9, 0.02).unwrap();
        let s = ExactSampler::new(NoiseModel::ideal_spam(ch));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let mut cfg = PipelineConfig::new(0.2, 0.1);
        let a = canonical_estimator_pipeline(&g, &cfg, &s, &mut rng).unwrap();
        cfg.batched = false;
        let b = canonical_estimator_pipeline(&g, &cfg, &s, &mut rng).unwrap();
        for (x, y) in a.marginals.iter().zip(&b.marginals) {
            for (u, v) in x.table.iter().zip(&y.table) {
                assert!((u - v).abs() < 1e-10);
            }
        }
        assert!(a.budget.total_measurements < b.budget.total_measurements);
    }

    #[test]
    fn oversized_closure_rejected() {
        let g = FactorGraph::new(7, vec![(0..7).collect()]).unwrap();
        let s = ExactSampler::new(NoiseModel::ideal_spam(PauliChannel::identity(7)));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let err = canonical_estimator_pipeline(&g, &PipelineConfig::new(0.1, 0.1), &s, &mut rng).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }
}
