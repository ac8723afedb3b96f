use serde::{Deserialize, Serialize};

use super::budget::SampleBudget;
use super::ratio::{ratio, RatioConfig, RatioOutput, Schedule};
use crate::channel::{f_to_p_projected, MarginalDistribution};
use crate::error::{Error, Result};
use crate::pauli::{cover_mub_group, PauliGroup, ENUMERATION_CAP};
use crate::sim::CbSampler;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupDiagnostics {
    /// `max_x r_hat_x` over the group.
    pub r_hat_inf: f64,
    pub cover_size: usize,
    pub budget: SampleBudget,
}

impl GroupDiagnostics {
    /// Error scale `eps * ||r||_inf` expected of the marginal, up to a
    /// constant.
    pub fn predicted_bound(&self, epsilon: f64) -> f64 {
        epsilon * self.r_hat_inf
    }
}

#[derive(Clone, Debug)]
pub struct GroupReconstruction {
    pub marginal: MarginalDistribution,
    pub diagnostics: GroupDiagnostics,
    pub ratio: RatioOutput,
}

/// Estimates the marginal of the channel on `A_G` from every eigenvalue in
/// `G`.
///
/// Covering groups run in lockstep so every group spends exactly `|kappa|`
/// rounds.
pub fn reconstruct_group(
    g: &PauliGroup,
    cfg: &RatioConfig,
    sampler: &dyn CbSampler,
) -> Result<GroupReconstruction> {
    let k = g.rank();
    if k > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "group rank for reconstruction",
            value: k,
            cap: ENUMERATION_CAP,
        });
    }
    let cover = cover_mub_group(g)?;
    let elements: Vec<_> = (0..1usize << k).map(|c| g.element(c)).collect();
    let cfg = RatioConfig {
        schedule: Schedule::SharedKappa,
        ..cfg.clone()
    };
    let out = ratio(&cover, &elements, &cfg, sampler)?;
    // element(c) lists distinct Paulis, so estimates line up with coordinates
    let f_hat: Vec<f64> = out.estimates.iter().map(|e| 1.0 - e.r_hat).collect();
    let marginal = f_to_p_projected(g, &f_hat)?;
    let r_hat_inf = out.estimates.iter().map(|e| e.r_hat).fold(0.0, f64::max);
    Ok(GroupReconstruction {
        marginal,
        diagnostics: GroupDiagnostics {
            r_hat_inf,
            cover_size: cover.len(),
            budget: out.budget.clone(),
        },
        ratio: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::PauliChannel;
    use crate::sim::{ExactSampler, NoiseModel};

    #[test]
    fn noiseless_gives_identity_marginal() {
        let s = ExactSampler::new(NoiseModel::ideal_spam(PauliChannel::identity(2)));
        let g = PauliGroup::full(2);
        let cfg = RatioConfig {
            m_cap: 16,
            ..RatioConfig::new(1)
        };
        let out = reconstruct_group(&g, &cfg, &s).unwrap();
        assert!((out.marginal.probs[0] - 1.0).abs() < 1e-6);
        assert_eq!(out.diagnostics.cover_size, 5);
        assert_eq!(out.diagnostics.budget.rounds, 5 * 5);
    }

    #[test]
    fn exact_sampler_recovers_depolarizing_pair() {
        let ch = PauliChannel::depolarizing_product(2, 0.03).unwrap();
        let s = ExactSampler::new(NoiseModel::ideal_spam(ch.clone()));
        let g = PauliGroup::full(2);
        let out = reconstruct_group(&g, &RatioConfig::new(1), &s).unwrap();
        let truth = crate::channel::marginal_channel(&ch, &g).unwrap();
        for (a, b) in out.marginal.probs.iter().zip(&truth.probs) {
            assert!((a - b).abs() < 1e-10);
        }
        let kappa = out.diagnostics.budget.kappa.len() as u64;
        assert_eq!(out.diagnostics.budget.rounds, kappa * 5);
    }
}
