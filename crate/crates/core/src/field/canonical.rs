use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::graph::{AugmentedFactor, FactorGraph};
use super::table::{digit, local_index, LocalMarginal, TABLE_CAP};
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Conditionals are clamped to this floor before taking logs.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalFactor {
    pub vars: Vec<usize>,
    pub parent: usize,
    /// Over `4^{|vars|}` entries; zero whenever any argument is the identity.
    pub log_phi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalEstimate {
    pub n: usize,
    pub factors: Vec<CanonicalFactor>,
    pub p0_hat: Option<f64>,
    /// Conditionals that hit [`PROB_FLOOR`].
    pub clamped: usize,
}

/// For one augmented factor `D`: `p(y_D, 0_{dD})` over all `y_D`, and
/// `p(0_{dD})`, both read from the parent's closure marginal.
#[derive(Clone, Debug)]
pub(crate) struct ReferenceSlice {
    pub aug: AugmentedFactor,
    pub joint: Vec<f64>,
    pub blanket_zero: f64,
}

pub(crate) fn reference_slices(graph: &FactorGraph, marginals: &[LocalMarginal]) -> Result<Vec<ReferenceSlice>> {
    if marginals.len() != graph.num_factors() {
        return Err(Error::LengthMismatch {
            expected: graph.num_factors(),
            found: marginals.len(),
        });
    }
    graph
        .augmented_factors()
        .into_iter()
        .map(|aug| {
            let blanket = graph.markov_blanket(&aug.vars);
            let m = &marginals[aug.parent];
            let mut vars = aug.vars.clone();
            vars.extend(&blanket);
            if vars.iter().any(|q| !m.vars.contains(q)) {
                return Err(Error::MissingMarginal(aug.parent));
            }
            // D first, blanket after: with blanket digits zero, the index
            // is 4^{|dD|} times the index of y_D
            let t = m.marginal(&vars)?;
            let stride = 1usize << (2 * blanket.len());
            let joint: Vec<f64> = (0..1usize << (2 * aug.vars.len())).map(|y| t[y * stride]).collect();
            let blanket_zero = joint.iter().sum();
            Ok(ReferenceSlice {
                aug,
                joint,
                blanket_zero,
            })
        })
        .collect()
}

/// `sum_{U subset D} (-1)^{|D - U|} g(sigma_U(x))` for every `x`, where
/// `sigma_U` keeps the digits on `U` and sets the rest to the identity.
/// The sum cancels in pairs when some digit of `x` is the identity, so
/// those entries are set to zero directly.
pub(crate) fn mobius(g: &[f64], d: usize) -> Vec<f64> {
    (0..1usize << (2 * d))
        .map(|x| {
            if (0..d).any(|p| digit(x, p, d) == 0) {
                return 0.0;
            }
            (0..1usize << d)
                .map(|mask: usize| {
                    let y = (0..d).fold(0, |acc, p| {
                        let keep = mask >> (d - 1 - p) & 1 == 1;
                        (acc << 2) | if keep { digit(x, p, d) } else { 0 }
                    });
                    let sign = if (d - mask.count_ones() as usize) % 2 == 0 { 1.0 } else { -1.0 };
                    sign * g[y]
                })
                .sum()
        })
        .collect()
}

/// Canonical potentials from closure marginals, one per factor in factor
/// order. Each marginal must cover its factor's closure.
pub fn canonical_potentials(graph: &FactorGraph, marginals: &[LocalMarginal]) -> Result<CanonicalEstimate> {
    let mut clamped = 0;
    let factors = reference_slices(graph, marginals)?
        .into_iter()
        .map(|s| {
            let lc: Vec<f64> = s
                .joint
                .iter()
                .map(|&j| {
                    let c = j / s.blanket_zero;
                    if !(c >= PROB_FLOOR) {
                        clamped += 1;
                        PROB_FLOOR.ln()
                    } else {
                        c.ln()
                    }
                })
                .collect();
            CanonicalFactor {
                log_phi: mobius(&lc, s.aug.vars.len()),
                vars: s.aug.vars,
                parent: s.aug.parent,
            }
        })
        .collect();
    if clamped > 0 {
        log::warn!("{clamped} conditional probabilities clamped to {PROB_FLOOR:e}");
    }
    Ok(CanonicalEstimate {
        n: graph.num_vars(),
        factors,
        p0_hat: None,
        clamped,
    })
}

/// `sum_j log phi_j(x_{C*_j})`; add `log p(0)` to get `log p(x)`.
pub fn evaluate_unnormalized(est: &CanonicalEstimate, x: &PauliString) -> f64 {
    est.factors.iter().map(|f| f.log_phi[local_index(x, &f.vars)]).sum()
}

impl CanonicalEstimate {
    /// Unnormalized log values over all `4^n` assignments.
    pub fn dense_log_values(&self) -> Result<Vec<f64>> {
        let n = self.n;
        if n > TABLE_CAP {
            return Err(Error::CapExceeded {
                what: "variables for dense enumeration",
                value: n,
                cap: TABLE_CAP,
            });
        }
        Ok((0..1usize << (2 * n))
            .map(|i| {
                self.factors
                    .iter()
                    .map(|f| f.log_phi[f.vars.iter().fold(0, |acc, &q| (acc << 2) | digit(i, q, n))])
                    .sum()
            })
            .collect())
    }

    /// Exact normalization by enumeration.
    pub fn normalized_dense(&self) -> Result<Vec<f64>> {
        let logs = self.dense_log_values()?;
        let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logs.iter().map(|l| (l - m).exp()).collect();
        let z: f64 = w.iter().sum();
        Ok(w.into_iter().map(|x| x / z).collect())
    }

    /// Potential tables keyed by comma-separated variable lists.
    pub fn log_phi_map(&self) -> BTreeMap<String, Vec<f64>> {
        self.factors
            .iter()
            .map(|f| {
                let key = f.vars.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
                (key, f.log_phi.clone())
            })
            .collect()
    }
}
