use serde::{Deserialize, Serialize};

use super::canonical::{reference_slices, CanonicalEstimate, PROB_FLOOR};
use super::graph::FactorGraph;
use super::table::LocalMarginal;
use crate::error::{Error, Result};

/// Error terms of the canonical estimator. Minima and maxima run over
/// every factor and subfactor `C` with its own blanket `dC`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundDiagnostics {
    /// `min sqrt(p(x_C | 0_dC) q(x_C | 0_dC))`.
    pub g_geo: f64,
    /// `max |p(x_C, 0_dC) - q(x_C, 0_dC)|`.
    pub eps1: f64,
    /// `max |p(0_dC) - q(0_dC)|`.
    pub eps2: f64,
    /// `min p(0_dC)`.
    pub gamma: f64,
    /// `max_C ||1_I - p(x_closure(C))||_inf` over factors.
    pub r_star: f64,
    pub nu: usize,
    pub num_factors: usize,
    /// `max |log(p(x_C | 0_dC) / q(x_C | 0_dC))|`.
    pub max_log_ratio: f64,
    /// `N 3^nu max_log_ratio`.
    pub log_bound: f64,
    /// `N 3^nu (eps1 + eps2) / (gamma G)`.
    pub bound_value: f64,
}

impl BoundDiagnostics {
    /// `eps2 <= 4^nu eps1`, with rounding slack.
    pub fn eps_relation_holds(&self) -> bool {
        self.eps2 <= 4f64.powi(self.nu as i32) * self.eps1 * (1.0 + 1e-9) + 1e-15
    }
}

fn r_star(marginals: &[LocalMarginal]) -> f64 {
    marginals
        .iter()
        .map(|m| {
            let off = m.table.iter().skip(1).copied().fold(0.0, f64::max);
            (1.0 - m.table[0]).abs().max(off)
        })
        .fold(0.0, f64::max)
}

fn assemble(graph: &FactorGraph, p: &[LocalMarginal], q: &[LocalMarginal], eps: Option<f64>) -> Result<BoundDiagnostics> {
    let sp = reference_slices(graph, p)?;
    let sq = reference_slices(graph, q)?;
    let (mut g_geo, mut eps1, mut eps2, mut gamma, mut max_log) = (f64::INFINITY, 0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    for (a, b) in sp.iter().zip(&sq) {
        eps2 = eps2.max((a.blanket_zero - b.blanket_zero).abs());
        gamma = gamma.min(a.blanket_zero);
        for (&ja, &jb) in a.joint.iter().zip(&b.joint) {
            let ca = (ja / a.blanket_zero).max(PROB_FLOOR);
            let cb = (jb / b.blanket_zero).max(PROB_FLOOR);
            g_geo = g_geo.min((ca * cb).sqrt());
            eps1 = eps1.max((ja - jb).abs());
            max_log = max_log.max((ca / cb).ln().abs());
        }
    }
    if let Some(e) = eps {
        eps1 = e;
        eps2 = e;
    }
    let nu = graph.nu();
    let n_f = graph.num_factors();
    let scale = n_f as f64 * 3f64.powi(nu as i32);
    Ok(BoundDiagnostics {
        g_geo,
        eps1,
        eps2,
        gamma,
        r_star: r_star(p),
        nu,
        num_factors: n_f,
        max_log_ratio: max_log,
        log_bound: scale * max_log,
        bound_value: scale * (eps1 + eps2) / (gamma * g_geo),
    })
}

/// Diagnostics against exact closure marginals `truth`.
pub fn bound_diagnostics(graph: &FactorGraph, truth: &[LocalMarginal], est: &[LocalMarginal]) -> Result<BoundDiagnostics> {
    assemble(graph, truth, est, None)
}

/// Diagnostics with the estimates standing in for the truth and a
/// predicted error scale `eps_hat` for both error terms.
pub fn plug_in_diagnostics(graph: &FactorGraph, est: &[LocalMarginal], eps_hat: f64) -> Result<BoundDiagnostics> {
    assemble(graph, est, est, Some(eps_hat))
}

/// `(|log(a/b)|, |a - b| / sqrt(ab))`; the first never exceeds the second.
pub fn log_ratio_lemma(a: f64, b: f64) -> (f64, f64) {
    ((a / b).ln().abs(), (a - b).abs() / (a * b).sqrt())
}

/// Exact norms and the two distribution-level bounds for dense `p`, `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleChecks {
    pub l1: f64,
    /// `sum_C max |log(phi_p / phi_q)|` over the canonical factors.
    pub factor_bound: f64,
    /// `sqrt(n) max_u ||p(x_u') - q(x_u')||_2 / sqrt(min q(x_u'))`, with
    /// `u'` the closure of variable `u`.
    pub sqrt_n_bound: f64,
}

impl OracleChecks {
    pub fn factor_bound_holds(&self) -> bool {
        self.l1 <= self.factor_bound * (1.0 + 1e-9) + 1e-12
    }

    pub fn sqrt_n_holds(&self) -> bool {
        self.l1 <= self.sqrt_n_bound * (1.0 + 1e-9) + 1e-12
    }
}

pub fn oracle_checks(
    graph: &FactorGraph,
    p: &[f64],
    q: &[f64],
    phi_p: &CanonicalEstimate,
    phi_q: &CanonicalEstimate,
) -> Result<OracleChecks> {
    let n = graph.num_vars();
    if p.len() != q.len() || p.len() != 1 << (2 * n) {
        return Err(Error::LengthMismatch {
            expected: 1 << (2 * n),
            found: q.len(),
        });
    }
    if phi_p.factors.len() != phi_q.factors.len() {
        return Err(Error::InvalidParameter("canonical estimates from different graphs".into()));
    }
    let l1 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    let factor_bound = phi_p
        .factors
        .iter()
        .zip(&phi_q.factors)
        .map(|(a, b)| {
            a.log_phi
                .iter()
                .zip(&b.log_phi)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        })
        .sum();
    let mut worst: f64 = 0.0;
    for u in 0..n {
        let c = graph.closure(&[u]);
        let pu = LocalMarginal::from_dense(p, n, &c)?;
        let qu = LocalMarginal::from_dense(q, n, &c)?;
        let q_min = qu.table.iter().copied().fold(f64::INFINITY, f64::min);
        let l2 = pu
            .table
            .iter()
            .zip(&qu.table)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(l2 / q_min.sqrt());
    }
    Ok(OracleChecks {
        l1,
        factor_bound,
        sqrt_n_bound: (n as f64).sqrt() * worst,
    })
}
