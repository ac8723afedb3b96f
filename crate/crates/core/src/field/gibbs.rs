use rand::Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use super::graph::FactorGraph;
use super::table::{digit, local_index, TABLE_CAP};
use crate::channel::PauliChannel;
use crate::error::{Error, Result};
use crate::pauli::{Pauli1, PauliString};

/// `p(x) = exp(sum_k log phi_k(x_{C_k}) - log Z)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GibbsField {
    pub graph: FactorGraph,
    /// One table per factor, over `4^{|C_k|}` entries.
    pub log_potentials: Vec<Vec<f64>>,
    pub log_partition: Option<f64>,
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

impl GibbsField {
    pub fn new(graph: FactorGraph, log_potentials: Vec<Vec<f64>>) -> Result<Self> {
        if log_potentials.len() != graph.num_factors() {
            return Err(Error::LengthMismatch {
                expected: graph.num_factors(),
                found: log_potentials.len(),
            });
        }
        for (f, t) in graph.factors().iter().zip(&log_potentials) {
            if t.len() != 1 << (2 * f.len()) {
                return Err(Error::LengthMismatch {
                    expected: 1 << (2 * f.len()),
                    found: t.len(),
                });
            }
            if t.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter("potentials must be positive and finite".into()));
            }
        }
        Ok(GibbsField {
            graph,
            log_potentials,
            log_partition: None,
        })
    }

    /// Potentials `-bias * weight(x) + U(-spread, spread)`, so the identity
    /// is favoured when `bias` is large.
    pub fn random<R: Rng + ?Sized>(graph: FactorGraph, bias: f64, spread: f64, rng: &mut R) -> Self {
        let u = Uniform::new_inclusive(-spread, spread).expect("valid range");
        let tables = graph
            .factors()
            .iter()
            .map(|f| {
                (0..1usize << (2 * f.len()))
                    .map(|i| {
                        let w = (0..f.len()).filter(|&p| digit(i, p, f.len()) != 0).count();
                        -bias * w as f64 + u.sample(rng)
                    })
                    .collect()
            })
            .collect();
        GibbsField::new(graph, tables).expect("consistent shapes")
    }

    pub fn num_vars(&self) -> usize {
        self.graph.num_vars()
    }

    pub fn log_unnormalized(&self, x: &PauliString) -> f64 {
        self.graph
            .factors()
            .iter()
            .zip(&self.log_potentials)
            .map(|(f, t)| t[local_index(x, f)])
            .sum()
    }

    fn check_dense(&self) -> Result<usize> {
        let n = self.num_vars();
        if n > TABLE_CAP {
            return Err(Error::CapExceeded {
                what: "variables for dense enumeration",
                value: n,
                cap: TABLE_CAP,
            });
        }
        Ok(n)
    }

    /// Unnormalized log values over all `4^n` assignments.
    pub fn dense_log_unnormalized(&self) -> Result<Vec<f64>> {
        let n = self.check_dense()?;
        Ok((0..1usize << (2 * n))
            .map(|i| {
                self.graph
                    .factors()
                    .iter()
                    .zip(&self.log_potentials)
                    .map(|(f, t)| t[f.iter().fold(0, |acc, &q| (acc << 2) | digit(i, q, n))])
                    .sum()
            })
            .collect())
    }

    /// Normalized distribution by enumeration; fills `log_partition`.
    pub fn dense_distribution(&mut self) -> Result<Vec<f64>> {
        let logs = self.dense_log_unnormalized()?;
        let z = log_sum_exp(logs.iter().copied());
        self.log_partition = Some(z);
        Ok(logs.into_iter().map(|l| (l - z).exp()).collect())
    }

    pub fn to_channel(&mut self) -> Result<PauliChannel> {
        let n = self.num_vars();
        PauliChannel::dense(n, self.dense_distribution()?)
    }

    /// Exact ancestral sampler when every factor lies on `{i}` or
    /// `{i, i+1}`.
    pub fn chain_sampler(&self) -> Result<ChainSampler> {
        ChainSampler::new(self)
    }
}

/// Backward messages of a chain-structured field.
#[derive(Clone, Debug)]
pub struct ChainSampler {
    n: usize,
    unary: Vec<[f64; 4]>,
    pair: Vec<[[f64; 4]; 4]>,
    beta: Vec<[f64; 4]>,
    log_partition: f64,
}

impl ChainSampler {
    fn new(field: &GibbsField) -> Result<Self> {
        let n = field.num_vars();
        let mut unary = vec![[0.0; 4]; n];
        let mut pair = vec![[[0.0; 4]; 4]; n.saturating_sub(1)];
        for (f, t) in field.graph.factors().iter().zip(&field.log_potentials) {
            match f.as_slice() {
                &[q] => (0..4).for_each(|a| unary[q][a] += t[a]),
                &[a, b] if b == a + 1 => {
                    for x in 0..4 {
                        for y in 0..4 {
                            pair[a][x][y] += t[4 * x + y];
                        }
                    }
                }
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "factor {f:?} is not chain-structured"
                    )))
                }
            }
        }
        let mut beta = vec![[0.0; 4]; n];
        for i in (0..n.saturating_sub(1)).rev() {
            for x in 0..4 {
                beta[i][x] = log_sum_exp((0..4).map(|y| pair[i][x][y] + unary[i + 1][y] + beta[i + 1][y]));
            }
        }
        let log_partition = if n == 0 {
            0.0
        } else {
            log_sum_exp((0..4).map(|x| unary[0][x] + beta[0][x]))
        };
        Ok(ChainSampler {
            n,
            unary,
            pair,
            beta,
            log_partition,
        })
    }

    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PauliString {
        let mut out = PauliString::identity(self.n);
        let mut prev: Option<usize> = None;
        for i in 0..self.n {
            let w: [f64; 4] = std::array::from_fn(|y| {
                let link = prev.map_or(0.0, |x| self.pair[i - 1][x][y]);
                link + self.unary[i][y] + self.beta[i][y]
            });
            let m = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let e: [f64; 4] = std::array::from_fn(|y| (w[y] - m).exp());
            let mut u = rng.random::<f64>() * e.iter().sum::<f64>();
            let mut pick = 3;
            for (y, &v) in e.iter().enumerate() {
                if u < v {
                    pick = y;
                    break;
                }
                u -= v;
            }
            out.set(i, Pauli1::from_digit(pick));
            prev = Some(pick);
        }
        out
    }
}
