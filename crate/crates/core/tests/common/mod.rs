#![allow(dead_code)]

pub mod scenarios;
pub mod suites;

use pauli_probe::channel::PauliChannel;
use pauli_probe::pauli::{PauliString, StabilizerGroup};
use rand::Rng;

pub fn random_pauli<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PauliString {
    PauliString::from_dense_index(n, rng.random_range(0..1usize << (2 * n)))
}

/// Random stabilizer group of rank `1..=n`, built by rejection.
pub fn random_stabilizer<R: Rng + ?Sized>(n: usize, rng: &mut R) -> StabilizerGroup {
    let rank = rng.random_range(1..=n);
    loop {
        let mut gens: Vec<PauliString> = Vec::new();
        for _ in 0..200 {
            if gens.len() == rank {
                break;
            }
            let p = random_pauli(n, rng);
            if p.is_identity() || !gens.iter().all(|g| g.commutes_with(&p)) {
                continue;
            }
            let mut trial = gens.clone();
            trial.push(p);
            if StabilizerGroup::new(n, trial.clone()).is_ok() {
                gens = trial;
            }
        }
        if let Ok(g) = StabilizerGroup::new(n, gens) {
            if g.rank() == rank {
                return g;
            }
        }
    }
}

/// Dense channel with identity rate near `1 - scale` and random errors.
pub fn random_channel<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> PauliChannel {
    let d = 1usize << (2 * n);
    let mut rates: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    rates[0] = 0.0;
    let total: f64 = rates.iter().sum();
    let err = scale * rng.random::<f64>();
    for r in rates.iter_mut() {
        *r *= err / total;
    }
    rates[0] = 1.0 - err;
    PauliChannel::dense(n, rates).unwrap()
}
