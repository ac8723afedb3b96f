//! Coverings of Pauli sets by stabilizer groups.

use super::group::{PauliGroup, StabilizerGroup};
use super::string::PauliString;
use crate::error::{Error, Result};

/// Cap on the number of logical qubits handled by [`cover_mub`].
pub const MUB_LOGICAL_CAP: usize = 16;

/// Stabilizer groups whose union contains a target set.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerCovering {
    pub groups: Vec<StabilizerGroup>,
}

impl StabilizerCovering {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Index of the first group containing `p`.
    pub fn locate(&self, p: &PauliString) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(p))
    }

    pub fn covers(&self, set: &[PauliString]) -> bool {
        set.iter()
            .all(|p| p.is_identity() || self.locate(p).is_some())
    }
}

/// One single-generator group per distinct non-identity element.
pub fn cover_trivial(set: &[PauliString]) -> Result<StabilizerCovering> {
    let mut seen = std::collections::HashSet::new();
    let mut groups = Vec::new();
    for x in set {
        if x.is_identity() || !seen.insert(x.clone()) {
            continue;
        }
        groups.push(StabilizerGroup::new(x.num_qubits(), vec![x.clone()])?);
    }
    Ok(StabilizerCovering { groups })
}

/// Symplectic decomposition of a group: its radical plus hyperbolic pairs
/// `(x_i, z_i)` with `<x_i, z_j> = [i == j]` and all other products zero.
pub struct SymplecticBasis {
    pub radical: Vec<PauliString>,
    pub pairs: Vec<(PauliString, PauliString)>,
}

pub fn symplectic_basis(group: &PauliGroup) -> SymplecticBasis {
    let mut rest: Vec<PauliString> = group.generators().to_vec();
    let mut radical = Vec::new();
    let mut pairs = Vec::new();
    while !rest.is_empty() {
        let v = rest.remove(0);
        let Some(j) = rest.iter().position(|u| v.symplectic(u)) else {
            radical.push(v);
            continue;
        };
        let w = rest.remove(j);
        for u in rest.iter_mut() {
            let (a, b) = (u.symplectic(&w), u.symplectic(&v));
            if a {
                *u ^= &v;
            }
            if b {
                *u ^= &w;
            }
        }
        pairs.push((v, w));
    }
    SymplecticBasis { radical, pairs }
}

/// Mutually unbiased covering of `<set>`: one group for each of the
/// `2^k + 1` Lagrangians of the k logical qubits, each joined with the
/// radical. Groups pairwise intersect in the radical only.
pub fn cover_mub(set: &[PauliString]) -> Result<StabilizerCovering> {
    let n = set
        .first()
        .map(|p| p.num_qubits())
        .ok_or_else(|| Error::InvalidParameter("cover_mub of an empty set".into()))?;
    cover_mub_group(&PauliGroup::span(n, set)?)
}

pub fn cover_mub_group(group: &PauliGroup) -> Result<StabilizerCovering> {
    let n = group.num_qubits();
    let basis = symplectic_basis(group);
    let k = basis.pairs.len();
    if k > MUB_LOGICAL_CAP {
        return Err(Error::CapExceeded {
            what: "logical qubits",
            value: k,
            cap: MUB_LOGICAL_CAP,
        });
    }
    if k == 0 {
        let g = StabilizerGroup::new(n, basis.radical)?;
        return Ok(StabilizerCovering { groups: vec![g] });
    }
    let field = Gf2k::new(k);
    let lift = |xbits: u32, zbits: u32| {
        let mut p = PauliString::identity(n);
        for (i, (lx, lz)) in basis.pairs.iter().enumerate() {
            if (xbits >> i) & 1 == 1 {
                p ^= lx;
            }
            if (zbits >> i) & 1 == 1 {
                p ^= lz;
            }
        }
        p
    };
    let mut groups = Vec::with_capacity((1 << k) + 1);
    for a in 0..(1u32 << k) {
        let m = field.trace_form(a);
        let mut gens = basis.radical.clone();
        gens.extend((0..k).map(|i| lift(1 << i, m[i])));
        groups.push(StabilizerGroup::new(n, gens)?);
    }
    let mut gens = basis.radical.clone();
    gens.extend((0..k).map(|i| lift(0, 1 << i)));
    groups.push(StabilizerGroup::new(n, gens)?);
    Ok(StabilizerCovering { groups })
}

/// GF(2^k) in the polynomial basis, only as much as the covering needs.
struct Gf2k {
    k: usize,
    poly: u32,
    /// `Tr(t^l)` for `l < 3k`.
    traces: Vec<u32>,
}

impl Gf2k {
    fn new(k: usize) -> Self {
        let poly = irreducible(k);
        let mut f = Gf2k {
            k,
            poly,
            traces: Vec::new(),
        };
        let mut tl = 1u32;
        for _ in 0..3 * k {
            f.traces.push(f.trace(tl));
            tl = f.mul(tl, 0b10);
        }
        f
    }

    fn mul(&self, mut a: u32, mut b: u32) -> u32 {
        let mut r = 0u32;
        while b != 0 {
            if b & 1 == 1 {
                r ^= a;
            }
            b >>= 1;
            a <<= 1;
            if (a >> self.k) & 1 == 1 {
                a ^= self.poly;
            }
        }
        r
    }

    fn trace(&self, a: u32) -> u32 {
        let (mut acc, mut s) = (0u32, a);
        for _ in 0..self.k {
            acc ^= s;
            s = self.mul(s, s);
        }
        debug_assert!(acc <= 1);
        acc
    }

    /// Columns of the symmetric matrix `M[i][j] = Tr(a t^i t^j)`, column j
    /// packed with bit i.
    fn trace_form(&self, a: u32) -> Vec<u32> {
        (0..self.k)
            .map(|j| {
                (0..self.k).fold(0u32, |col, i| {
                    let bit = (0..self.k)
                        .filter(|b| (a >> b) & 1 == 1)
                        .fold(0, |t, b| t ^ self.traces[b + i + j]);
                    col | (bit << i)
                })
            })
            .collect()
    }
}

fn irreducible(k: usize) -> u32 {
    let deg = |p: u32| 31 - p.leading_zeros() as usize;
    let rem = |mut a: u32, b: u32| {
        while a != 0 && deg(a) >= deg(b) {
            a ^= b << (deg(a) - deg(b));
        }
        a
    };
    (1u32 << k..1u32 << (k + 1))
        .find(|&p| (2u32..1 << (k / 2 + 1)).all(|d| deg(d) > k / 2 || rem(p, d) != 0))
        .expect("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::string::parse_list;

    fn elements(g: &PauliGroup) -> Vec<String> {
        let mut e: Vec<_> = g.enumerate().unwrap().iter().map(|p| p.to_string()).collect();
        e.sort();
        e
    }

    #[test]
    fn irreducible_polys() {
        assert_eq!(irreducible(1), 0b10);
        assert_eq!(irreducible(2), 0b111);
        assert_eq!(irreducible(3), 0b1011);
        assert_eq!(irreducible(4), 0b10011);
    }

    #[test]
    fn trivial_cover() {
        let set = parse_list("XI, IZ, XI, II").unwrap();
        let c = cover_trivial(&set).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.covers(&set));
    }

    #[test]
    fn mub_single_qubit() {
        let c = cover_mub(&parse_list("X, Y, Z").unwrap()).unwrap();
        let mut sets: Vec<_> = c.groups.iter().map(|g| elements(g)).collect();
        sets.sort();
        assert_eq!(
            sets,
            vec![vec!["I", "X"], vec!["I", "Y"], vec!["I", "Z"]]
        );
    }

    #[test]
    fn mub_isotropic_input_is_one_group() {
        let c = cover_mub(&parse_list("ZZ, ZI").unwrap()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(elements(&c.groups[0]), vec!["II", "IZ", "ZI", "ZZ"]);
    }

    #[test]
    fn mub_two_qubits_partition() {
        let all = PauliGroup::full(2).enumerate().unwrap();
        let c = cover_mub(&all).unwrap();
        assert_eq!(c.len(), 5);
        let mut seen = std::collections::HashMap::new();
        for g in &c.groups {
            assert_eq!(g.rank(), 2);
            for e in g.enumerate().unwrap() {
                if !e.is_identity() {
                    *seen.entry(e).or_insert(0) += 1;
                }
            }
        }
        assert_eq!(seen.len(), 15);
        assert!(seen.values().all(|&c| c == 1));
    }

    #[test]
    fn mub_with_radical() {
        // <ZZ, XI, ZI>: radical <IZ>, one logical qubit
        let set = parse_list("ZZ, XI, ZI").unwrap();
        let c = cover_mub(&set).unwrap();
        assert_eq!(c.len(), 3);
        for g in &c.groups {
            assert!(g.contains(&"IZ".parse().unwrap()));
        }
        assert!(c.covers(&set));
    }
}
