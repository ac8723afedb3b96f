//! Channels used by the statistical criteria.

#![allow(dead_code)]

use pauli_probe::channel::{single_qubit_rates, LocalFactor, PauliChannel};
use pauli_probe::field::{FactorGraph, GibbsField, LocalMarginal};
use pauli_probe::pauli::PauliString;

pub const PLANTED: &str = "XYZX";

/// Single-qubit depolarizing noise `p` on every qubit and the planted
/// weight-4 error on qubits 0..4 with probability `planted`.
pub fn planted_channel(n: usize, p: f64, planted: f64) -> PauliChannel {
    assert!(n >= 4);
    let mut factors: Vec<LocalFactor> = (0..n)
        .map(|q| LocalFactor::new(vec![q], single_qubit_rates(p / 3.0, p / 3.0, p / 3.0)).unwrap())
        .collect();
    let local: PauliString = PLANTED.parse().unwrap();
    let mut table = vec![0.0; 256];
    table[0] = 1.0 - planted;
    table[local.dense_index()] = planted;
    factors.push(LocalFactor::new(vec![0, 1, 2, 3], table).unwrap());
    PauliChannel::factored(n, factors).unwrap()
}

pub fn planted_pauli(n: usize) -> PauliString {
    PauliString::embed(&PLANTED.parse().unwrap(), &[0, 1, 2, 3], n)
}

/// Depolarizing noise `p` on every qubit plus `Z Z` with probability `zz`
/// on every neighbouring pair of a line.
pub fn chain_channel(n: usize, zz: f64, p: f64) -> PauliChannel {
    let mut factors: Vec<LocalFactor> = (0..n)
        .map(|q| LocalFactor::new(vec![q], single_qubit_rates(p / 3.0, p / 3.0, p / 3.0)).unwrap())
        .collect();
    let zz_index = "ZZ".parse::<PauliString>().unwrap().dense_index();
    for q in 0..n.saturating_sub(1) {
        let mut table = vec![0.0; 16];
        table[0] = 1.0 - zz;
        table[zz_index] = zz;
        factors.push(LocalFactor::new(vec![q, q + 1], table).unwrap());
    }
    PauliChannel::factored(n, factors).unwrap()
}

/// Markov chain with the same neighbouring pair marginals as
/// [`chain_channel`]: `p(x) = P_01 prod_k P_{k,k+1} / P_k`. The channel itself
/// is not Markov on the chain (overlapping pair flips cancel), this field is.
pub fn chain_field(n: usize, zz: f64, p: f64) -> GibbsField {
    assert!(n >= 2);
    let dense = chain_channel(n, zz, p).to_dense().unwrap();
    let marginal = |vars: &[usize]| LocalMarginal::from_dense(&dense, n, vars).unwrap().table;
    let tables = (0..n - 1)
        .map(|k| {
            let pair = marginal(&[k, k + 1]);
            let single = marginal(&[k]);
            (0..16)
                .map(|i| pair[i].ln() - if k == 0 { 0.0 } else { single[i >> 2].ln() })
                .collect()
        })
        .collect();
    GibbsField::new(FactorGraph::chain(n).unwrap(), tables).unwrap()
}

pub fn weight_one(n: usize) -> Vec<PauliString> {
    use pauli_probe::pauli::Pauli1;
    (0..n)
        .flat_map(|q| [Pauli1::X, Pauli1::Y, Pauli1::Z].map(|p| PauliString::single(n, q, p)))
        .collect()
}
