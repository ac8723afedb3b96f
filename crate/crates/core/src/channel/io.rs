//! JSON channel descriptions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ChannelRepr, LocalFactor, PauliChannel};
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// `{"n": .., "repr": "dense" | "sparse" | "factored", ..}`.
///
/// Dense rates are a `4^n` array in Pauli string order; sparse rates and
/// factor rates are maps keyed by Pauli strings (factor keys are local to
/// the factor's qubits).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "repr", rename_all = "lowercase")]
pub enum ChannelSpec {
    Dense {
        n: usize,
        rates: Vec<f64>,
    },
    Sparse {
        n: usize,
        rates: BTreeMap<String, f64>,
    },
    Factored {
        n: usize,
        factors: Vec<FactorSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub qubits: Vec<usize>,
    pub rates: BTreeMap<String, f64>,
}

fn keyed_to_dense(k: usize, rates: &BTreeMap<String, f64>) -> Result<Vec<f64>> {
    let mut v = vec![0.0; 1 << (2 * k)];
    for (label, r) in rates {
        let p: PauliString = label.parse()?;
        if p.num_qubits() != k {
            return Err(Error::QubitMismatch {
                expected: k,
                found: p.num_qubits(),
            });
        }
        v[p.dense_index()] += r;
    }
    Ok(v)
}

fn dense_to_keyed(k: usize, rates: &[f64]) -> BTreeMap<String, f64> {
    rates
        .iter()
        .enumerate()
        .filter(|(_, &r)| r != 0.0)
        .map(|(i, &r)| (PauliString::from_dense_index(k, i).to_string(), r))
        .collect()
}

impl ChannelSpec {
    pub fn build(&self) -> Result<PauliChannel> {
        match self {
            ChannelSpec::Dense { n, rates } => PauliChannel::dense(*n, rates.clone()),
            ChannelSpec::Sparse { n, rates } => {
                let entries: Result<Vec<_>> = rates
                    .iter()
                    .map(|(l, r)| l.parse::<PauliString>().map(|p| (p, *r)))
                    .collect();
                PauliChannel::sparse(*n, entries?)
            }
            ChannelSpec::Factored { n, factors } => {
                let fs: Result<Vec<_>> = factors
                    .iter()
                    .map(|f| LocalFactor::new(f.qubits.clone(), keyed_to_dense(f.qubits.len(), &f.rates)?))
                    .collect();
                PauliChannel::factored(*n, fs?)
            }
        }
    }

    pub fn from_channel(ch: &PauliChannel) -> Self {
        let n = ch.num_qubits();
        match ch.repr() {
            ChannelRepr::Dense(r) => ChannelSpec::Dense { n, rates: r.clone() },
            ChannelRepr::Sparse(e) => ChannelSpec::Sparse {
                n,
                rates: e.iter().map(|(p, r)| (p.to_string(), *r)).collect(),
            },
            ChannelRepr::Factored(fs) => ChannelSpec::Factored {
                n,
                factors: fs
                    .iter()
                    .map(|f| FactorSpec {
                        qubits: f.qubits.clone(),
                        rates: dense_to_keyed(f.qubits.len(), &f.rates),
                    })
                    .collect(),
            },
        }
    }

    pub fn from_json(s: &str) -> Result<PauliChannel> {
        let spec: ChannelSpec =
            serde_json::from_str(s).map_err(|e| Error::InvalidChannel(e.to_string()))?;
        spec.build()
    }
}

impl Serialize for PauliChannel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelSpec::from_channel(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PauliChannel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ChannelSpec::deserialize(d)?
            .build()
            .map_err(serde::de::Error::custom)
    }
}
