//! Cycle benchmarking: Pauli-frame simulation, exact outcome distributions
//! and the sampler interface used by the estimators.

mod frame;
pub mod rng;
mod sampler;

use serde::{Deserialize, Serialize};

pub use frame::{FrameMode, FrameSampler};
pub use sampler::{CbSampler, ExactSampler, ExperimentRecord, SimulatedSampler, VRequest};

use crate::channel::PauliChannel;
use crate::error::{Error, Result};
use crate::pauli::{fwht, PauliGroup, PauliString, StabilizerGroup, SyndromeVector};

/// Gate noise together with Pauli state-preparation and measurement noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Noise on every application of the benchmarked gate.
    pub gate: PauliChannel,
    pub prep: PauliChannel,
    pub meas: PauliChannel,
}

impl NoiseModel {
    /// Gate noise with ideal preparation and measurement.
    pub fn ideal_spam(gate: PauliChannel) -> Self {
        let n = gate.num_qubits();
        NoiseModel {
            gate,
            prep: PauliChannel::identity(n),
            meas: PauliChannel::identity(n),
        }
    }

    pub fn new(gate: PauliChannel, prep: PauliChannel, meas: PauliChannel) -> Result<Self> {
        let n = gate.num_qubits();
        for ch in [&prep, &meas] {
            if ch.num_qubits() != n {
                return Err(Error::QubitMismatch {
                    expected: n,
                    found: ch.num_qubits(),
                });
            }
        }
        Ok(NoiseModel { gate, prep, meas })
    }

    pub fn num_qubits(&self) -> usize {
        self.gate.num_qubits()
    }

    /// `A_h = f^prep_h f^meas_h f^gate_h [h in G ∩ H]` for Pauli SPAM.
    pub fn spam_coefficient(&self, prep: &PauliGroup, h: &PauliString) -> f64 {
        if !prep.contains(h) {
            return 0.0;
        }
        self.prep.eigenvalue(h) * self.meas.eigenvalue(h) * self.gate.eigenvalue(h)
    }
}

/// One shot of a length-m CB experiment preparing `G` and measuring `H`.
/// Returns the outcome relative to the ideal frame.
pub fn run_cb<R: rand::Rng + ?Sized>(
    prep: &StabilizerGroup,
    meas: &StabilizerGroup,
    m: u64,
    model: &NoiseModel,
    rng: &mut R,
) -> Result<SyndromeVector> {
    let sampler = FrameSampler::new(model, prep, meas, m, FrameMode::PerGate)?;
    Ok(meas.syndrome(&sampler.sample(rng)))
}

/// SPAM coefficients over the elements of `H`, indexed by packed
/// coordinates.
pub fn spam_coefficients(prep: &StabilizerGroup, meas: &StabilizerGroup, model: &NoiseModel) -> Result<Vec<f64>> {
    let k = check_rank(meas)?;
    Ok((0..1usize << k)
        .map(|c| model.spam_coefficient(prep, &meas.element(c)))
        .collect())
}

fn check_rank(g: &PauliGroup) -> Result<usize> {
    let k = g.rank();
    if k > crate::pauli::ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "measured generators",
            value: k,
            cap: crate::pauli::ENUMERATION_CAP,
        });
    }
    Ok(k)
}

/// `Pr(z) = |A_H|^{-1} sum_h f_h^m (-1)^{<h,z>} A_h` from per-element
/// eigenvalues and SPAM coefficients indexed by packed coordinates.
pub fn likelihood_from_parameters(m: u64, f: &[f64], a: &[f64]) -> Vec<f64> {
    assert_eq!(f.len(), a.len());
    let e = i32::try_from(m).unwrap_or(i32::MAX);
    let mut v: Vec<f64> = f.iter().zip(a).map(|(f, a)| f.powi(e) * a).collect();
    fwht(&mut v);
    let inv = 1.0 / v.len() as f64;
    v.into_iter().map(|x| x * inv).collect()
}

/// Exact outcome distribution over packed syndromes of `H`.
pub fn exact_likelihood(
    prep: &StabilizerGroup,
    meas: &StabilizerGroup,
    m: u64,
    model: &NoiseModel,
) -> Result<Vec<f64>> {
    let k = check_rank(meas)?;
    let f: Vec<f64> = (0..1usize << k)
        .map(|c| model.gate.eigenvalue(&meas.element(c)))
        .collect();
    Ok(likelihood_from_parameters(m, &f, &spam_coefficients(prep, meas, model)?))
}

/// Single-shot moments of the estimator: `E[V_x] = A_x f_x^m` and
/// `E[V_x V_x'] = A_{x+x'} f_{x+x'}^m`, for `x, x'` in `G`.
pub fn predict_v_moments(
    group: &StabilizerGroup,
    xs: &[PauliString],
    m: u64,
    model: &NoiseModel,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    for x in xs {
        if !group.contains(x) {
            return Err(Error::NotInGroup(x.to_string()));
        }
    }
    let e = i32::try_from(m).unwrap_or(i32::MAX);
    let mean_of = |x: &PauliString| model.spam_coefficient(group, x) * model.gate.eigenvalue(x).powi(e);
    let mean = xs.iter().map(mean_of).collect();
    let second = xs
        .iter()
        .map(|x| xs.iter().map(|y| mean_of(&x.mul(y))).collect())
        .collect();
    Ok((mean, second))
}
