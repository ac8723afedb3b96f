//! Pauli channels: error rates `p`, eigenvalues `f = W p`, marginals and
//! figures of merit.

mod io;
mod simplex;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use io::{ChannelSpec, FactorSpec};
pub use simplex::project_simplex;

use crate::error::{Error, Result};
use crate::pauli::walsh::{dense_pauli_transform, fwht};
use crate::pauli::{PauliGroup, PauliString};

/// Largest register for which a 4^n table is materialized.
pub const DENSE_CAP: usize = 13;
/// Largest support of a single local factor.
pub const FACTOR_CAP: usize = 10;

const NORMALIZATION_TOL: f64 = 1e-9;

/// A local table over `4^{|qubits|}` Paulis in dense order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalFactor {
    pub qubits: Vec<usize>,
    pub rates: Vec<f64>,
}

impl LocalFactor {
    pub fn new(qubits: Vec<usize>, rates: Vec<f64>) -> Result<Self> {
        let k = qubits.len();
        if k == 0 || k > FACTOR_CAP {
            return Err(Error::InvalidChannel(format!(
                "factor support size {k} outside 1..={FACTOR_CAP}"
            )));
        }
        if rates.len() != 1 << (2 * k) {
            return Err(Error::LengthMismatch {
                expected: 1 << (2 * k),
                found: rates.len(),
            });
        }
        check_distribution(&rates)?;
        Ok(LocalFactor { qubits, rates })
    }

    /// Dense index of `p` restricted to this factor's qubits.
    pub fn local_index(&self, p: &PauliString) -> usize {
        self.qubits
            .iter()
            .fold(0, |acc, &q| (acc << 2) | p.get(q).digit())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChannelRepr {
    /// All `4^n` rates in dense order.
    Dense(Vec<f64>),
    /// Nonzero rates, sorted by Pauli.
    Sparse(Vec<(PauliString, f64)>),
    /// Independent local channels applied in sequence. Errors compose by
    /// multiplication, so eigenvalues multiply across factors. Factors may
    /// overlap.
    Factored(Vec<LocalFactor>),
}

/// A Pauli channel `E(rho) = sum_a p_a P_a rho P_a`.
#[derive(Debug)]
pub struct PauliChannel {
    n: usize,
    repr: ChannelRepr,
    /// Dense eigenvalues, or one eigenvalue table per local factor.
    eig_cache: OnceLock<Vec<Vec<f64>>>,
}

impl Clone for PauliChannel {
    fn clone(&self) -> Self {
        PauliChannel {
            n: self.n,
            repr: self.repr.clone(),
            eig_cache: self.eig_cache.clone(),
        }
    }
}

impl PartialEq for PauliChannel {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.repr == other.repr
    }
}

fn check_distribution(rates: &[f64]) -> Result<()> {
    if let Some(x) = rates.iter().find(|&&x| !x.is_finite() || x < -1e-12) {
        return Err(Error::InvalidChannel(format!("invalid rate {x}")));
    }
    let s: f64 = rates.iter().sum();
    if (s - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidChannel(format!("rates sum to {s}, not 1")));
    }
    Ok(())
}

impl PauliChannel {
    fn with_repr(n: usize, repr: ChannelRepr) -> Self {
        PauliChannel {
            n,
            repr,
            eig_cache: OnceLock::new(),
        }
    }

    pub fn dense(n: usize, rates: Vec<f64>) -> Result<Self> {
        if n > DENSE_CAP {
            return Err(Error::CapExceeded {
                what: "qubits for a dense channel",
                value: n,
                cap: DENSE_CAP,
            });
        }
        if rates.len() != 1 << (2 * n) {
            return Err(Error::LengthMismatch {
                expected: 1 << (2 * n),
                found: rates.len(),
            });
        }
        check_distribution(&rates)?;
        Ok(Self::with_repr(n, ChannelRepr::Dense(rates)))
    }

    pub fn sparse(n: usize, entries: impl IntoIterator<Item = (PauliString, f64)>) -> Result<Self> {
        let mut map: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (p, r) in entries {
            if p.num_qubits() != n {
                return Err(Error::QubitMismatch {
                    expected: n,
                    found: p.num_qubits(),
                });
            }
            *map.entry(p).or_insert(0.0) += r;
        }
        let entries: Vec<_> = map.into_iter().filter(|(_, r)| *r != 0.0).collect();
        check_distribution(&entries.iter().map(|e| e.1).collect::<Vec<_>>())?;
        Ok(Self::with_repr(n, ChannelRepr::Sparse(entries)))
    }

    pub fn factored(n: usize, factors: Vec<LocalFactor>) -> Result<Self> {
        for f in &factors {
            let mut qs = f.qubits.clone();
            qs.sort_unstable();
            qs.dedup();
            if qs.len() != f.qubits.len() || qs.last().is_some_and(|&q| q >= n) {
                return Err(Error::InvalidChannel(format!(
                    "bad factor support {:?} for n = {n}",
                    f.qubits
                )));
            }
        }
        Ok(Self::with_repr(n, ChannelRepr::Factored(factors)))
    }

    pub fn identity(n: usize) -> Self {
        Self::with_repr(n, ChannelRepr::Sparse(vec![(PauliString::identity(n), 1.0)]))
    }

    /// Single-qubit depolarizing with total error `p` on every qubit.
    pub fn depolarizing_product(n: usize, p: f64) -> Result<Self> {
        Self::factored(
            n,
            (0..n)
                .map(|q| LocalFactor::new(vec![q], vec![1.0 - p, p / 3.0, p / 3.0, p / 3.0]))
                .collect::<Result<_>>()?,
        )
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn repr(&self) -> &ChannelRepr {
        &self.repr
    }

    /// Local (qubits, rates) tables whose independent draws compose to this
    /// channel. Sparse channels have none.
    pub fn factors(&self) -> Vec<LocalFactor> {
        match &self.repr {
            ChannelRepr::Dense(r) => vec![LocalFactor {
                qubits: (0..self.n).collect(),
                rates: r.clone(),
            }],
            ChannelRepr::Sparse(_) => Vec::new(),
            ChannelRepr::Factored(f) => f.clone(),
        }
    }

    fn eig_tables(&self) -> &Vec<Vec<f64>> {
        self.eig_cache.get_or_init(|| match &self.repr {
            ChannelRepr::Dense(r) => {
                let mut f = r.clone();
                dense_pauli_transform(&mut f);
                vec![f]
            }
            ChannelRepr::Sparse(_) => Vec::new(),
            ChannelRepr::Factored(fs) => fs
                .iter()
                .map(|lf| {
                    let mut f = lf.rates.clone();
                    dense_pauli_transform(&mut f);
                    f
                })
                .collect(),
        })
    }

    /// `f_a = sum_b (-1)^{<a,b>} p_b`.
    pub fn eigenvalue(&self, a: &PauliString) -> f64 {
        assert_eq!(a.num_qubits(), self.n, "qubit count mismatch");
        match &self.repr {
            ChannelRepr::Dense(_) => self.eig_tables()[0][a.dense_index()],
            ChannelRepr::Sparse(e) => e.iter().map(|(b, r)| a.sign(b) * r).sum(),
            ChannelRepr::Factored(fs) => fs
                .iter()
                .zip(self.eig_tables())
                .map(|(lf, t)| t[lf.local_index(a)])
                .product(),
        }
    }

    /// Eigenvalues on an explicit support, in the given order.
    pub fn p_to_f(&self, support: &[PauliString]) -> EigenvalueVector {
        EigenvalueVector {
            paulis: support.to_vec(),
            values: support.iter().map(|a| self.eigenvalue(a)).collect(),
        }
    }

    fn factors_disjoint(fs: &[LocalFactor]) -> bool {
        let mut seen = std::collections::HashSet::new();
        fs.iter().flat_map(|f| &f.qubits).all(|q| seen.insert(*q))
    }

    /// `p_a`. Overlapping factored channels need a dense expansion.
    pub fn error_rate(&self, a: &PauliString) -> Result<f64> {
        match &self.repr {
            ChannelRepr::Dense(r) => Ok(r[a.dense_index()]),
            ChannelRepr::Sparse(e) => Ok(e
                .binary_search_by(|(b, _)| b.cmp(a))
                .map(|i| e[i].1)
                .unwrap_or(0.0)),
            ChannelRepr::Factored(fs) => {
                if Self::factors_disjoint(fs) {
                    let covered: std::collections::HashSet<usize> =
                        fs.iter().flat_map(|f| f.qubits.iter().copied()).collect();
                    if a.support().iter().any(|q| !covered.contains(q)) {
                        return Ok(0.0);
                    }
                    Ok(fs.iter().map(|f| f.rates[f.local_index(a)]).product())
                } else {
                    Ok(self.to_dense()?[a.dense_index()])
                }
            }
        }
    }

    /// Probability of no error.
    pub fn identity_rate(&self) -> Result<f64> {
        self.error_rate(&PauliString::identity(self.n))
    }

    /// All `4^n` rates; refused above [`DENSE_CAP`].
    pub fn to_dense(&self) -> Result<Vec<f64>> {
        if self.n > DENSE_CAP {
            return Err(Error::CapExceeded {
                what: "qubits for a dense expansion",
                value: self.n,
                cap: DENSE_CAP,
            });
        }
        let size = 1usize << (2 * self.n);
        match &self.repr {
            ChannelRepr::Dense(r) => Ok(r.clone()),
            ChannelRepr::Sparse(e) => {
                let mut v = vec![0.0; size];
                for (p, r) in e {
                    v[p.dense_index()] += r;
                }
                Ok(v)
            }
            ChannelRepr::Factored(_) => {
                let mut f = self.dense_eigenvalues()?;
                dense_pauli_transform(&mut f);
                let inv = 1.0 / size as f64;
                Ok(f.into_iter().map(|x| x * inv).collect())
            }
        }
    }

    /// All `4^n` eigenvalues in dense order.
    pub fn dense_eigenvalues(&self) -> Result<Vec<f64>> {
        if self.n > DENSE_CAP {
            return Err(Error::CapExceeded {
                what: "qubits for a dense expansion",
                value: self.n,
                cap: DENSE_CAP,
            });
        }
        let size = 1usize << (2 * self.n);
        match &self.repr {
            ChannelRepr::Dense(_) => Ok(self.eig_tables()[0].clone()),
            ChannelRepr::Sparse(_) => {
                let mut v = self.to_dense()?;
                dense_pauli_transform(&mut v);
                Ok(v)
            }
            ChannelRepr::Factored(fs) => {
                let mut out = vec![1.0; size];
                for (lf, table) in fs.iter().zip(self.eig_tables()) {
                    for (i, o) in out.iter_mut().enumerate() {
                        let mut li = 0;
                        for &q in &lf.qubits {
                            li = (li << 2) | ((i >> (2 * (self.n - 1 - q))) & 3);
                        }
                        *o *= table[li];
                    }
                }
                Ok(out)
            }
        }
    }

    /// Channel applied `k` times in a row (eigenvalues raised to `k`).
    pub fn power(&self, k: u64) -> Result<PauliChannel> {
        let pow_table = |rates: &[f64]| {
            let mut f = rates.to_vec();
            dense_pauli_transform(&mut f);
            for x in f.iter_mut() {
                *x = x.powi(k.min(i32::MAX as u64) as i32);
            }
            dense_pauli_transform(&mut f);
            let inv = 1.0 / f.len() as f64;
            let mut p: Vec<f64> = f.into_iter().map(|x| (x * inv).max(0.0)).collect();
            let s: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= s);
            p
        };
        match &self.repr {
            ChannelRepr::Factored(fs) => PauliChannel::factored(
                self.n,
                fs.iter()
                    .map(|lf| LocalFactor {
                        qubits: lf.qubits.clone(),
                        rates: pow_table(&lf.rates),
                    })
                    .collect(),
            ),
            _ => PauliChannel::dense(self.n, pow_table(&self.to_dense()?)),
        }
    }
}

/// Eigenvalues on an explicit list of Paulis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueVector {
    pub paulis: Vec<PauliString>,
    pub values: Vec<f64>,
}

/// A distribution over `A_G = P^n / C_G`, indexed by packed syndrome over
/// the generators of `G`.
#[derive(Clone, Debug)]
pub struct MarginalDistribution {
    pub group: PauliGroup,
    pub probs: Vec<f64>,
}

impl MarginalDistribution {
    pub fn prob(&self, e: &PauliString) -> f64 {
        self.probs[self.group.syndrome_index(e)]
    }

    /// Re-index as a dense table over the Paulis supported on `qubits`.
    /// The group must be the full Pauli group on those qubits.
    pub fn to_local_table(&self, qubits: &[usize]) -> Vec<f64> {
        let n = self.group.num_qubits();
        let k = qubits.len();
        (0..1usize << (2 * k))
            .map(|i| {
                let local = PauliString::from_dense_index(k, i);
                self.prob(&PauliString::embed(&local, qubits, n))
            })
            .collect()
    }
}

/// `|G|^{-1} W_{A_G,G} f_hat` followed by projection onto the simplex.
///
/// `f_hat[c]` is the estimate for the group element with packed
/// coordinates `c`.
pub fn f_to_p_projected(group: &PauliGroup, f_hat: &[f64]) -> Result<MarginalDistribution> {
    let raw = f_to_p_raw(group, f_hat)?;
    Ok(MarginalDistribution {
        group: group.clone(),
        probs: project_simplex(&raw),
    })
}

/// Unprojected inverse transform.
pub fn f_to_p_raw(group: &PauliGroup, f_hat: &[f64]) -> Result<Vec<f64>> {
    let k = group.rank();
    if k > crate::pauli::ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "group rank for inversion",
            value: k,
            cap: crate::pauli::ENUMERATION_CAP,
        });
    }
    if f_hat.len() != 1 << k {
        return Err(Error::LengthMismatch {
            expected: 1 << k,
            found: f_hat.len(),
        });
    }
    // <g, a> = c(g) . s(a), so the transform is a plain fwht in coordinates
    let mut v = f_hat.to_vec();
    fwht(&mut v);
    let inv = 1.0 / v.len() as f64;
    Ok(v.into_iter().map(|x| x * inv).collect())
}

/// `p_{A_G, a} = sum_{c in C_G} p_{a + c}`.
pub fn marginal_channel(ch: &PauliChannel, group: &PauliGroup) -> Result<MarginalDistribution> {
    let k = group.rank();
    if k > crate::pauli::ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "group rank for marginals",
            value: k,
            cap: crate::pauli::ENUMERATION_CAP,
        });
    }
    let mut probs = vec![0.0; 1 << k];
    match ch.repr() {
        ChannelRepr::Dense(r) => {
            for (i, &x) in r.iter().enumerate() {
                if x != 0.0 {
                    probs[group.syndrome_index(&PauliString::from_dense_index(ch.n, i))] += x;
                }
            }
        }
        ChannelRepr::Sparse(e) => {
            for (p, x) in e {
                probs[group.syndrome_index(p)] += x;
            }
        }
        ChannelRepr::Factored(_) => {
            let mut f = vec![0.0; 1 << k];
            for (c, slot) in f.iter_mut().enumerate() {
                *slot = ch.eigenvalue(&group.element(c));
            }
            probs = f_to_p_raw(group, &f)?;
        }
    }
    Ok(MarginalDistribution {
        group: group.clone(),
        probs,
    })
}

/// `Delta_X = 1 - max_{x in X, x != I} |f_x|`.
pub fn spectral_gap(ch: &PauliChannel, set: &[PauliString]) -> f64 {
    1.0 - set
        .iter()
        .filter(|x| !x.is_identity())
        .map(|x| ch.eigenvalue(x).abs())
        .fold(0.0, f64::max)
}

/// Diamond distance to the identity and average infidelity.
pub fn diamond_and_infidelity(ch: &PauliChannel) -> Result<(f64, f64)> {
    let diamond = 1.0 - ch.identity_rate()?;
    let d = 2f64.powi(ch.n as i32);
    Ok((diamond, diamond / (1.0 + 1.0 / d)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub c: f64,
    /// Smallest eigenvalue, or a lower bound on it when `exact` is false.
    pub min_eigenvalue: f64,
    pub exact: bool,
    pub c_weak: bool,
    pub c_stable: bool,
    /// `p_0 >= 1 - c/2`, which implies c-weak.
    pub sufficient: bool,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.c_weak && self.c_stable
    }
}

/// c-weak noise means every eigenvalue lies in `[1-c, 1]`; c-stable SPAM
/// means every SPAM coefficient is at least `1-c`.
pub fn check_assumptions(ch: &PauliChannel, spam: &[f64], c: f64) -> AssumptionReport {
    let p0_lower = match ch.repr() {
        ChannelRepr::Factored(fs) if ch.n > DENSE_CAP => {
            // independent factors: no error anywhere is one way to get I
            fs.iter().map(|f| f.rates[0]).product()
        }
        _ => ch.identity_rate().unwrap_or(0.0),
    };
    let (min_f, exact) = match ch.dense_eigenvalues() {
        Ok(f) if ch.n <= 10 => (f.into_iter().fold(f64::INFINITY, f64::min), true),
        _ => (2.0 * p0_lower - 1.0, false),
    };
    AssumptionReport {
        c,
        min_eigenvalue: min_f,
        exact,
        c_weak: min_f >= 1.0 - c,
        c_stable: spam.iter().all(|&a| a >= 1.0 - c),
        sufficient: p0_lower >= 1.0 - c / 2.0,
    }
}

/// Local table for a single-qubit channel from its X, Y, Z rates.
pub fn single_qubit_rates(px: f64, py: f64, pz: f64) -> Vec<f64> {
    vec![1.0 - px - py - pz, px, py, pz]
}

/// Convenience for building sparse channels from `(label, rate)` pairs.
pub fn sparse_from_labels(n: usize, entries: &[(&str, f64)]) -> Result<PauliChannel> {
    let parsed: Result<Vec<_>> = entries
        .iter()
        .map(|(s, r)| s.parse::<PauliString>().map(|p| (p, *r)))
        .collect();
    PauliChannel::sparse(n, parsed?)
}
