use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Variables are qubits `0..n`; factors are sorted, duplicate-free subsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphSpec", into = "GraphSpec")]
pub struct FactorGraph {
    n: usize,
    factors: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GraphSpec {
    n: usize,
    factors: Vec<Vec<usize>>,
}

impl TryFrom<GraphSpec> for FactorGraph {
    type Error = Error;
    fn try_from(s: GraphSpec) -> Result<Self> {
        FactorGraph::new(s.n, s.factors)
    }
}

impl From<FactorGraph> for GraphSpec {
    fn from(g: FactorGraph) -> Self {
        GraphSpec {
            n: g.n,
            factors: g.factors,
        }
    }
}

/// A subset of factors that appears in some factor, with the first factor
/// containing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentedFactor {
    pub vars: Vec<usize>,
    pub parent: usize,
}

impl FactorGraph {
    pub fn new(n: usize, factors: Vec<Vec<usize>>) -> Result<Self> {
        let mut covered = vec![false; n];
        let mut out = Vec::with_capacity(factors.len());
        for f in factors {
            let set: BTreeSet<usize> = f.iter().copied().collect();
            if set.is_empty() || set.len() != f.len() {
                return Err(Error::InvalidParameter(format!("bad factor {f:?}")));
            }
            if let Some(&q) = set.iter().find(|&&q| q >= n) {
                return Err(Error::InvalidParameter(format!("variable {q} outside 0..{n}")));
            }
            set.iter().for_each(|&q| covered[q] = true);
            out.push(set.into_iter().collect());
        }
        if let Some(q) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidParameter(format!("variable {q} is in no factor")));
        }
        Ok(FactorGraph { n, factors: out })
    }

    /// Nearest-neighbour pairs `{i, i+1}`.
    pub fn chain(n: usize) -> Result<Self> {
        if n < 2 {
            return Self::new(n, (0..n).map(|i| vec![i]).collect());
        }
        Self::new(n, (0..n - 1).map(|i| vec![i, i + 1]).collect())
    }

    /// A 3 x 4 grid of variables with one factor per 2 x 2 plaquette.
    pub fn plaquette_grid() -> Self {
        let factors = [0, 1, 2, 4, 5, 6]
            .iter()
            .map(|&c| vec![c, c + 1, c + 4, c + 5])
            .collect();
        Self::new(12, factors).expect("valid grid")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidParameter(format!("factor graph: {e}")))
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[Vec<usize>] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// `nu = max |C|`.
    pub fn nu(&self) -> usize {
        self.factors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `max |closure(C)|` over factors.
    pub fn nu_bar(&self) -> usize {
        (0..self.factors.len())
            .map(|k| self.factor_closure(k).len())
            .max()
            .unwrap_or(0)
    }

    /// Variables sharing a factor with `s`, excluding `s`.
    pub fn markov_blanket(&self, s: &[usize]) -> Vec<usize> {
        let inside: BTreeSet<usize> = s.iter().copied().collect();
        let mut out = BTreeSet::new();
        for f in &self.factors {
            if f.iter().any(|q| inside.contains(q)) {
                out.extend(f.iter().filter(|q| !inside.contains(q)));
            }
        }
        out.into_iter().collect()
    }

    pub fn closure(&self, s: &[usize]) -> Vec<usize> {
        let mut out: BTreeSet<usize> = s.iter().copied().collect();
        out.extend(self.markov_blanket(s));
        out.into_iter().collect()
    }

    pub fn factor_closure(&self, k: usize) -> Vec<usize> {
        self.closure(&self.factors[k])
    }

    /// All nonempty subsets of factors, each listed once with the first
    /// factor that contains it.
    pub fn augmented_factors(&self) -> Vec<AugmentedFactor> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (k, f) in self.factors.iter().enumerate() {
            for mask in 1usize..1 << f.len() {
                let vars: Vec<usize> = (0..f.len()).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                if seen.insert(vars.clone()) {
                    out.push(AugmentedFactor { vars, parent: k });
                }
            }
        }
        out.sort_by(|a, b| a.vars.len().cmp(&b.vars.len()).then_with(|| a.vars.cmp(&b.vars)));
        out
    }
}

/// Greedy colouring of factor closures; two closures conflict when they
/// intersect. Returns factor indices per colour, in colour order.
pub fn independent_set_schedule(graph: &FactorGraph) -> Vec<Vec<usize>> {
    let closures: Vec<Vec<usize>> = (0..graph.num_factors()).map(|k| graph.factor_closure(k)).collect();
    let mut batches: Vec<(Vec<usize>, Vec<bool>)> = Vec::new();
    for (k, c) in closures.iter().enumerate() {
        let slot = batches.iter().position(|(_, used)| c.iter().all(|&q| !used[q]));
        let i = slot.unwrap_or_else(|| {
            batches.push((Vec::new(), vec![false; graph.num_vars()]));
            batches.len() - 1
        });
        batches[i].0.push(k);
        c.iter().for_each(|&q| batches[i].1[q] = true);
    }
    batches.into_iter().map(|b| b.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_blankets() {
        let g = FactorGraph::plaquette_grid();
        // variables are 0-indexed here: x1 is 0
        assert_eq!(g.markov_blanket(&[0]), vec![1, 4, 5]);
        assert_eq!(g.markov_blanket(&[0, 4]), vec![1, 5, 8, 9]);
        assert_eq!(g.closure(&[0, 1]), vec![0, 1, 2, 4, 5, 6]);
        assert_eq!(g.nu(), 4);
    }

    #[test]
    fn single_factor_has_empty_blanket() {
        let g = FactorGraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert!(g.markov_blanket(&[0, 1, 2]).is_empty());
        assert_eq!(independent_set_schedule(&g), vec![vec![0]]);
    }

    #[test]
    fn augmented_factors_are_deduplicated() {
        let g = FactorGraph::chain(3).unwrap();
        let aug = g.augmented_factors();
        let vars: Vec<_> = aug.iter().map(|a| a.vars.clone()).collect();
        assert_eq!(vars, vec![vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2]]);
        assert_eq!(aug[1].parent, 0);
        assert_eq!(aug[2].parent, 1);
    }

    #[test]
    fn disjoint_factors_share_a_batch() {
        let g = FactorGraph::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(independent_set_schedule(&g), vec![vec![0, 1]]);
    }

    #[test]
    fn uncovered_variable_rejected() {
        assert!(FactorGraph::new(3, vec![vec![0, 1]]).is_err());
        assert!(FactorGraph::from_json(r#"{"n": 2, "factors": [[0, 1]]}"#).is_ok());
    }
}
