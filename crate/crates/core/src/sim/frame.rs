//! Pauli-frame sampling of the accumulated error of one CB sequence.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::NoiseModel;
use crate::channel::{ChannelRepr, LocalFactor, PauliChannel};
use crate::error::Result;
use crate::pauli::walsh::dense_pauli_transform;
use crate::pauli::{Pauli1, PauliGroup, PauliString, StabilizerGroup};

/// Local tables up to this many qubits are convolved ahead of time instead
/// of being drawn once per gate.
const COLLAPSE_MAX_QUBITS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameMode {
    /// Draw every channel application separately.
    PerGate,
    /// Sample small local factors from their convolution power in one draw.
    Collapsed,
}

#[derive(Clone, Debug)]
enum Outcome {
    /// Dense index into the table of the component's qubits.
    Local(usize),
    Global(PauliString),
}

/// Repeated draws of one local channel; only non-identity outcomes are
/// stored, the number of errors is binomial.
#[derive(Clone, Debug)]
struct Component {
    qubits: Vec<usize>,
    outcomes: Vec<Outcome>,
    cdf: Vec<f64>,
    p_err: f64,
    draws: u64,
    binomial: Option<Binomial>,
}

impl Component {
    fn new(qubits: Vec<usize>, outcomes: Vec<(Outcome, f64)>, draws: u64) -> Option<Self> {
        let p_err: f64 = outcomes.iter().map(|o| o.1).sum();
        if draws == 0 || p_err <= 0.0 {
            return None;
        }
        let p_err = p_err.min(1.0);
        let mut acc = 0.0;
        let mut cdf = Vec::with_capacity(outcomes.len());
        for (_, w) in &outcomes {
            acc += w;
            cdf.push(acc / p_err.max(acc));
        }
        *cdf.last_mut().unwrap() = 1.0;
        let binomial = (draws > 1).then(|| Binomial::new(draws, p_err).expect("valid binomial"));
        Some(Component {
            qubits,
            outcomes: outcomes.into_iter().map(|o| o.0).collect(),
            cdf,
            p_err,
            draws,
            binomial,
        })
    }

    fn from_local(lf: &LocalFactor, draws: u64) -> Option<Self> {
        let outcomes = lf
            .rates
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &r)| r > 0.0)
            .map(|(i, &r)| (Outcome::Local(i), r))
            .collect();
        Component::new(lf.qubits.clone(), outcomes, draws)
    }

    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, acc: &mut PauliString) {
        let hits = match &self.binomial {
            Some(b) => b.sample(rng),
            None => (rng.random::<f64>() < self.p_err) as u64,
        };
        for _ in 0..hits {
            let u: f64 = rng.random();
            let i = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
            match &self.outcomes[i] {
                Outcome::Local(i) => {
                    let k = self.qubits.len();
                    for (j, &q) in self.qubits.iter().enumerate() {
                        let p = Pauli1::from_digit(i >> (2 * (k - 1 - j)));
                        if p != Pauli1::I {
                            acc.mul_qubit(q, p);
                        }
                    }
                }
                Outcome::Global(p) => *acc ^= p,
            }
        }
        debug_assert!(hits <= self.draws);
    }
}

/// `p` convolved with itself `k` times, through the eigenvalues.
fn convolution_power(rates: &[f64], k: u64) -> Vec<f64> {
    if k == 1 {
        return rates.to_vec();
    }
    let mut f = rates.to_vec();
    dense_pauli_transform(&mut f);
    let e = i32::try_from(k).unwrap_or(i32::MAX);
    f.iter_mut().for_each(|x| *x = x.powi(e));
    dense_pauli_transform(&mut f);
    let inv = 1.0 / f.len() as f64;
    let mut p: Vec<f64> = f.into_iter().map(|x| (x * inv).max(0.0)).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    p
}

fn components_for(ch: &PauliChannel, draws: u64, mode: FrameMode, out: &mut Vec<Component>) {
    match ch.repr() {
        ChannelRepr::Sparse(_) if mode == FrameMode::Collapsed && draws > 1 && ch.num_qubits() <= COLLAPSE_MAX_QUBITS => {
            let rates = ch.to_dense().expect("small register");
            let pow = LocalFactor {
                qubits: (0..ch.num_qubits()).collect(),
                rates: convolution_power(&rates, draws),
            };
            out.extend(Component::from_local(&pow, 1));
        }
        ChannelRepr::Sparse(entries) => {
            let outcomes = entries
                .iter()
                .filter(|(p, _)| !p.is_identity())
                .map(|(p, r)| (Outcome::Global(p.clone()), *r))
                .collect();
            out.extend(Component::new(Vec::new(), outcomes, draws));
        }
        _ => {
            for lf in ch.factors() {
                if mode == FrameMode::Collapsed && draws > 1 && lf.qubits.len() <= COLLAPSE_MAX_QUBITS {
                    let pow = LocalFactor {
                        qubits: lf.qubits.clone(),
                        rates: convolution_power(&lf.rates, draws),
                    };
                    out.extend(Component::from_local(&pow, 1));
                } else {
                    out.extend(Component::from_local(&lf, draws));
                }
            }
        }
    }
}

/// Samples the total error `E = e_meas + e_m + ... + e_0 + e_prep` of a
/// length-m CB sequence (m + 1 applications of the noisy gate). The random
/// compensating Paulis cancel in the frame and are not drawn.
#[derive(Clone, Debug)]
pub struct FrameSampler {
    n: usize,
    components: Vec<Component>,
    /// Basis of `C_{G ∩ H}` when `H` is not inside `G`; a uniform element is
    /// added to randomize outcomes the prepared state does not fix.
    scramble: Vec<PauliString>,
}

impl FrameSampler {
    pub fn new(
        model: &NoiseModel,
        prep: &StabilizerGroup,
        meas: &StabilizerGroup,
        m: u64,
        mode: FrameMode,
    ) -> Result<Self> {
        let n = model.num_qubits();
        let mut components = Vec::new();
        components_for(&model.prep, 1, mode, &mut components);
        components_for(&model.gate, m + 1, mode, &mut components);
        components_for(&model.meas, 1, mode, &mut components);
        let inside = meas.generators().iter().all(|h| prep.contains(h));
        let scramble = if inside {
            Vec::new()
        } else {
            let common: PauliGroup = prep.intersection(meas);
            common.commutant().generators().to_vec()
        };
        Ok(FrameSampler {
            n,
            components,
            scramble,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Writes one accumulated error into `acc`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, acc: &mut PauliString) {
        *acc = PauliString::identity(self.n);
        for c in &self.components {
            c.sample_into(rng, acc);
        }
        for s in &self.scramble {
            if rng.random::<bool>() {
                *acc ^= s;
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PauliString {
        let mut acc = PauliString::identity(self.n);
        self.sample_into(rng, &mut acc);
        acc
    }
}
