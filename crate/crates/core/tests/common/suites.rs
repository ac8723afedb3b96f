//! Criterion bodies shared by the integration tests and the acceptance
//! target. Each returns a one-line summary or the first violation.

#![allow(dead_code)]

use pauli_probe::field::{
    bound_diagnostics, canonical_potentials, oracle_checks, FactorGraph, GibbsField, LocalMarginal,
};
use pauli_probe::oracle::pauli_matrix;
use pauli_probe::pauli::{all_paulis, cover_mub, wh_apply, PauliGroup, PauliString};
use pauli_probe::sim::{exact_likelihood, run_cb, NoiseModel};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{random_channel, random_pauli, random_stabilizer};

pub type Outcome = Result<String, String>;

fn random_group<R: Rng + ?Sized>(n: usize, max_gens: usize, rng: &mut R) -> PauliGroup {
    let k = rng.random_range(0..=max_gens);
    let elems: Vec<PauliString> = (0..k).map(|_| random_pauli(n, rng)).collect();
    PauliGroup::span(n, &elems).unwrap()
}

/// Orthogonality, transform isometry, double commutant and MUB covers.
pub fn algebra(groups_per_n: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0usize;
    for n in 1..=3 {
        let all: Vec<PauliString> = all_paulis(n).collect();
        for _ in 0..groups_per_n {
            let g = random_group(n, 2 * n, &mut rng);
            let elems = g.enumerate().unwrap();
            let comm = g.commutant();
            for a in &all {
                let s: i64 = elems.iter().map(|b| if a.symplectic(b) { -1 } else { 1 }).sum();
                let expect = if comm.contains(a) { elems.len() as i64 } else { 0 };
                if s != expect {
                    return Err(format!("orthogonality fails for a={a} in G={:?}", g.generators()));
                }
                checked += 1;
            }
        }
    }
    // W^T W = |A| I on B when C_A ∩ B is trivial
    let mut isometries = 0;
    while isometries < groups_per_n {
        let n = rng.random_range(1..=4);
        let a = random_group(n, 2 * n, &mut rng);
        let b = random_group(n, 2 * n, &mut rng);
        if a.commutant().intersection(&b).rank() != 0 {
            continue;
        }
        let a_el = a.enumerate().unwrap();
        let b_el = b.enumerate().unwrap();
        for (j, bj) in b_el.iter().enumerate() {
            let mut e = vec![0i64; b_el.len()];
            e[j] = 1;
            let col = wh_apply(&a_el, &b_el, &e).unwrap();
            let back = wh_apply(&b_el, &a_el, &col).unwrap();
            for (i, v) in back.iter().enumerate() {
                let expect = if i == j { a_el.len() as i64 } else { 0 };
                if *v != expect {
                    return Err(format!("isometry fails at {bj}"));
                }
            }
        }
        isometries += 1;
    }
    for _ in 0..groups_per_n {
        let n = rng.random_range(1..=5);
        let g = random_group(n, 2 * n, &mut rng);
        if !g.commutant().commutant().same_elements(&g) {
            return Err(format!("double commutant differs for {:?}", g.generators()));
        }
    }
    for _ in 0..groups_per_n {
        let n = rng.random_range(1..=4);
        let set: Vec<PauliString> = (0..rng.random_range(1..=5)).map(|_| random_pauli(n, &mut rng)).collect();
        if set.iter().all(|p| p.is_identity()) {
            continue;
        }
        let span = PauliGroup::span(n, &set).unwrap();
        let cover = cover_mub(&set).unwrap();
        let k = (span.rank() - span.radical().rank()) / 2;
        let expect = if k == 0 { 1 } else { (1 << k) + 1 };
        if cover.len() != expect {
            return Err(format!("cover size {} != {expect}", cover.len()));
        }
        if !cover.groups.iter().all(|g| g.is_isotropic()) {
            return Err("non-isotropic cover group".into());
        }
        if !cover.covers(&span.enumerate().unwrap()) {
            return Err(format!("cover misses an element of <{set:?}>"));
        }
    }
    Ok(format!("{checked} orthogonality sums, {isometries} isometries"))
}

/// Commutation from the symplectic form agrees with matrix commutators.
pub fn symplectic_matches_matrices(n: usize) -> Outcome {
    let all: Vec<PauliString> = all_paulis(n).collect();
    for a in &all {
        let pa = pauli_matrix(a);
        for b in &all {
            let pb = pauli_matrix(b);
            let comm = (&pa * &pb - &pb * &pa).norm() < 1e-12;
            if comm != a.commutes_with(b) {
                return Err(format!("{a} {b}"));
            }
        }
    }
    Ok(format!("{} pairs", all.len() * all.len()))
}

/// Random factor graph with factors of size `1..=nu` covering every
/// variable, closures capped at `closure_cap` variables.
pub fn random_graph<R: Rng + ?Sized>(n: usize, nu: usize, closure_cap: usize, rng: &mut R) -> FactorGraph {
    loop {
        let count = rng.random_range(1..=n);
        let mut vars: Vec<usize> = (0..n).collect();
        let mut factors: Vec<Vec<usize>> = (0..count)
            .map(|_| {
                vars.shuffle(rng);
                let mut f = vars[..rng.random_range(1..=nu.min(n))].to_vec();
                f.sort_unstable();
                f
            })
            .collect();
        for v in 0..n {
            if !factors.iter().any(|f| f.contains(&v)) {
                factors.push(vec![v]);
            }
        }
        let g = FactorGraph::new(n, factors).unwrap();
        if (0..g.num_factors()).all(|k| g.factor_closure(k).len() <= closure_cap) {
            return g;
        }
    }
}

pub fn closure_marginals(graph: &FactorGraph, p: &[f64]) -> Vec<LocalMarginal> {
    (0..graph.num_factors())
        .map(|k| LocalMarginal::from_dense(p, graph.num_vars(), &graph.factor_closure(k)).unwrap())
        .collect()
}

fn l1(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum()
}

/// Exact closure marginals of a random field give the field back.
pub fn hc_roundtrip(instances: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..instances {
        let n = rng.random_range(2..=8);
        let nu = rng.random_range(1..=3);
        let graph = random_graph(n, nu, 8, &mut rng);
        let mut field = GibbsField::random(graph.clone(), 3.0, 1.5, &mut rng);
        let p = field.dense_distribution().unwrap();
        let est = canonical_potentials(&graph, &closure_marginals(&graph, &p)).unwrap();
        let q = est.normalized_dense().unwrap();
        let d = l1(&p, &q);
        worst = worst.max(d);
        if d > 1e-9 {
            return Err(format!("instance {i}: n={n} nu={nu} l1={d:.3e}"));
        }
    }
    Ok(format!("{instances} fields, max l1 {worst:.2e}"))
}

fn perturb<R: Rng + ?Sized>(m: &LocalMarginal, eta: f64, rng: &mut R) -> LocalMarginal {
    let mut t: Vec<f64> = m.table.iter().map(|x| x * (1.0 + eta * rng.random_range(-1.0..1.0))).collect();
    let s: f64 = t.iter().sum();
    t.iter_mut().for_each(|x| *x /= s);
    LocalMarginal::new(m.vars.clone(), t).unwrap()
}

#[derive(Debug, Default)]
pub struct BoundTally {
    pub instances: usize,
    pub factor_bound: usize,
    pub first_bound: usize,
    pub second_bound: usize,
    pub eps_relation: usize,
    pub sqrt_n: usize,
    /// Largest `l1 / sqrt_n_bound`.
    pub sqrt_n_worst: f64,
    pub sqrt_n_example: Option<String>,
}

impl BoundTally {
    pub fn summary(&self) -> String {
        format!(
            "{} instances: factor {} first {} second {} eps2 {} sqrt-n {} (worst l1/bound {:.3})",
            self.instances,
            self.factor_bound,
            self.first_bound,
            self.second_bound,
            self.eps_relation,
            self.sqrt_n,
            self.sqrt_n_worst
        )
    }
}

/// Each inequality counted over random fields and perturbed marginals.
pub fn bound_suite(instances: usize, seed: u64) -> BoundTally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = BoundTally {
        instances,
        ..Default::default()
    };
    for i in 0..instances {
        let n = rng.random_range(2..=8);
        let nu = rng.random_range(1..=3);
        let graph = random_graph(n, nu, 8, &mut rng);
        let bias = [0.0, 1.0, 3.0][(i / 3) % 3];
        let mut field = GibbsField::random(graph.clone(), bias, 1.5, &mut rng);
        let p = field.dense_distribution().unwrap();
        let truth = closure_marginals(&graph, &p);
        let eta = [1e-3, 1e-2, 0.1][i % 3];
        let est: Vec<LocalMarginal> = truth.iter().map(|m| perturb(m, eta, &mut rng)).collect();
        let phi_p = canonical_potentials(&graph, &truth).unwrap();
        let phi_q = canonical_potentials(&graph, &est).unwrap();
        let q = phi_q.normalized_dense().unwrap();
        let d = l1(&p, &q);
        let checks = oracle_checks(&graph, &p, &q, &phi_p, &phi_q).unwrap();
        let diag = bound_diagnostics(&graph, &truth, &est).unwrap();
        tally.factor_bound += checks.factor_bound_holds() as usize;
        tally.first_bound += (d <= diag.log_bound * (1.0 + 1e-9) + 1e-12) as usize;
        tally.second_bound += (d <= diag.bound_value * (1.0 + 1e-9) + 1e-12) as usize;
        tally.eps_relation += diag.eps_relation_holds() as usize;
        tally.sqrt_n += checks.sqrt_n_holds() as usize;
        let ratio = d / checks.sqrt_n_bound;
        if ratio > tally.sqrt_n_worst {
            tally.sqrt_n_worst = ratio;
            if !checks.sqrt_n_holds() {
                tally.sqrt_n_example = Some(format!("n={n} factors={:?} l1={d:.4e} bound={:.4e}", graph.factors(), checks.sqrt_n_bound));
            }
        }
    }
    tally
}

/// Pearson statistic with bins of expected count below 5 pooled.
pub fn chi_square_pvalue(counts: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let t = total as f64;
    let mut stat = 0.0;
    let mut bins = 0usize;
    let (mut pool_obs, mut pool_exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        let e = p.max(0.0) * t;
        if e < 5.0 {
            pool_obs += c as f64;
            pool_exp += e;
        } else {
            stat += (c as f64 - e).powi(2) / e;
            bins += 1;
        }
    }
    if pool_exp > 0.0 {
        stat += (pool_obs - pool_exp).powi(2) / pool_exp;
        bins += 1;
    } else if pool_obs > 0.0 {
        return 0.0;
    }
    if bins < 2 {
        return if pool_obs == pool_exp { 1.0 } else { 0.0 };
    }
    1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(stat)
}

/// Histograms of single-shot `run_cb` calls against the exact likelihood.
pub fn monte_carlo(scenarios: usize, shots: u64, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lengths = [0u64, 1, 4, 16];
    let mut min_p = 1.0f64;
    for s in 0..scenarios {
        let n = rng.random_range(1..=3);
        let m = lengths[s % lengths.len()];
        let model = NoiseModel::new(
            random_channel(n, 0.15, &mut rng),
            random_channel(n, 0.05, &mut rng),
            random_channel(n, 0.05, &mut rng),
        )
        .unwrap();
        let g = random_stabilizer(n, &mut rng);
        let h = if rng.random_bool(0.5) { g.clone() } else { random_stabilizer(n, &mut rng) };
        let probs = exact_likelihood(&g, &h, m, &model).unwrap();
        let mut counts = vec![0u64; probs.len()];
        let mut shot_rng = ChaCha8Rng::seed_from_u64(seed ^ (s as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        for _ in 0..shots {
            counts[run_cb(&g, &h, m, &model, &mut shot_rng).unwrap().index()] += 1;
        }
        let pv = chi_square_pvalue(&counts, &probs);
        min_p = min_p.min(pv);
        if pv < 1e-3 {
            return Err(format!("scenario {s}: n={n} m={m} p-value {pv:.2e}"));
        }
    }
    Ok(format!("{scenarios} scenarios, min p-value {min_p:.3}"))
}
