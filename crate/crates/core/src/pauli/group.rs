use std::fmt;

use serde::{Deserialize, Serialize};

use super::gf2::{self, Echelon};
use super::string::{words_for, Pauli1, PauliString};
use crate::error::{Error, Result};

/// Default cap on the number of generators for explicit enumeration.
pub const ENUMERATION_CAP: usize = 20;

/// A subgroup of the Pauli group (mod phase) presented by independent
/// generators. The generators need not commute.
#[derive(Clone)]
pub struct PauliGroup {
    n: usize,
    generators: Vec<PauliString>,
    echelon: Echelon,
}

impl PauliGroup {
    /// Fails on dependent generators or mixed register sizes.
    pub fn new(n: usize, generators: Vec<PauliString>) -> Result<Self> {
        let mut echelon = Echelon::new(2 * words_for(n), generators.len());
        for g in &generators {
            check_n(n, g)?;
            if !echelon.insert(&g.to_row()) {
                return Err(Error::DependentGenerators);
            }
        }
        Ok(PauliGroup {
            n,
            generators,
            echelon,
        })
    }

    /// The group generated by `elements`, keeping the first independent ones
    /// as generators.
    pub fn span(n: usize, elements: &[PauliString]) -> Result<Self> {
        let mut echelon = Echelon::new(2 * words_for(n), 2 * n);
        let mut generators = Vec::new();
        for e in elements {
            check_n(n, e)?;
            if echelon.insert(&e.to_row()) {
                generators.push(e.clone());
            }
        }
        Ok(PauliGroup {
            n,
            generators,
            echelon,
        })
    }

    pub fn trivial(n: usize) -> Self {
        PauliGroup::new(n, Vec::new()).expect("empty generator list")
    }

    /// All Paulis supported on `qubits`, generated by `X_q, Z_q` per qubit.
    pub fn on_qubits(n: usize, qubits: &[usize]) -> Self {
        let mut gens = Vec::with_capacity(2 * qubits.len());
        for &q in qubits {
            gens.push(PauliString::single(n, q, Pauli1::X));
            gens.push(PauliString::single(n, q, Pauli1::Z));
        }
        PauliGroup::new(n, gens).expect("distinct qubits give independent generators")
    }

    pub fn full(n: usize) -> Self {
        PauliGroup::on_qubits(n, &(0..n).collect::<Vec<_>>())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// `|G| = 2^rank`, or `None` if that overflows.
    pub fn order(&self) -> Option<u128> {
        1u128.checked_shl(self.rank() as u32)
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        p.num_qubits() == self.n && self.echelon.contains(&p.to_row())
    }

    /// Generator coefficients of `p`, bit i for generator i.
    pub fn coordinates(&self, p: &PauliString) -> Option<Vec<u64>> {
        if p.num_qubits() != self.n {
            return None;
        }
        self.echelon.coordinates(&p.to_row())
    }

    /// Like [`coordinates`](Self::coordinates) but packed in one word.
    pub fn coordinate_index(&self, p: &PauliString) -> Option<usize> {
        assert!(self.rank() <= 63);
        self.coordinates(p).map(|c| c[0] as usize)
    }

    /// Element with the given packed coordinates.
    pub fn element(&self, coords: usize) -> PauliString {
        let mut out = PauliString::identity(self.n);
        for (i, g) in self.generators.iter().enumerate() {
            if (coords >> i) & 1 == 1 {
                out ^= g;
            }
        }
        out
    }

    pub fn is_isotropic(&self) -> bool {
        let g = &self.generators;
        (0..g.len()).all(|i| (i + 1..g.len()).all(|j| g[i].commutes_with(&g[j])))
    }

    /// Elements in Gray-code order, identity first. Element `i` has packed
    /// coordinates `i ^ (i >> 1)`.
    pub fn enumerate(&self) -> Result<Vec<PauliString>> {
        self.enumerate_capped(ENUMERATION_CAP)
    }

    pub fn enumerate_capped(&self, cap: usize) -> Result<Vec<PauliString>> {
        if self.rank() > cap {
            return Err(Error::CapExceeded {
                what: "generators to enumerate",
                value: self.rank(),
                cap,
            });
        }
        let size = 1usize << self.rank();
        let mut out = Vec::with_capacity(size);
        let mut cur = PauliString::identity(self.n);
        out.push(cur.clone());
        for i in 1..size {
            cur ^= &self.generators[i.trailing_zeros() as usize];
            out.push(cur.clone());
        }
        Ok(out)
    }

    /// `C_G`: every Pauli commuting with all of G.
    pub fn commutant(&self) -> PauliGroup {
        let w = words_for(self.n);
        let mut constraints = Echelon::new(2 * w, self.rank());
        for g in &self.generators {
            constraints.insert(&g.to_dual_row());
        }
        let columns = (0..self.n).chain(64 * w..64 * w + self.n);
        let gens = constraints
            .null_space(columns)
            .into_iter()
            .map(|row| PauliString::from_row(self.n, &row))
            .collect();
        PauliGroup::new(self.n, gens).expect("null space basis is independent")
    }

    pub fn intersection(&self, other: &PauliGroup) -> PauliGroup {
        assert_eq!(self.n, other.n);
        let width = 2 * words_for(self.n);
        let mut residuals = Echelon::new(width, self.rank());
        let mut accepted = Vec::new();
        let mut gens = Vec::new();
        for (i, u) in self.generators.iter().enumerate() {
            let (r, _) = other.echelon.reduce(&u.to_row());
            let (rr, combo) = residuals.reduce(&r);
            if gf2::is_zero(&rr) {
                let mut elem = u.clone();
                for (j, &orig) in accepted.iter().enumerate() {
                    if gf2::bit(&combo, j) {
                        elem ^= &self.generators[orig];
                    }
                }
                gens.push(elem);
            } else {
                residuals.insert(&r);
                accepted.push(i);
            }
        }
        PauliGroup::new(self.n, gens).expect("intersection basis is independent")
    }

    /// `G ∩ C_G`, the elements commuting with the whole group.
    pub fn radical(&self) -> PauliGroup {
        self.intersection(&self.commutant())
    }

    /// Symplectic products with each generator.
    pub fn syndrome(&self, e: &PauliString) -> SyndromeVector {
        let mut s = SyndromeVector::zeros(self.rank());
        for (i, g) in self.generators.iter().enumerate() {
            if g.symplectic(e) {
                s.set(i, true);
            }
        }
        s
    }

    /// Packed syndrome; requires rank <= 63.
    pub fn syndrome_index(&self, e: &PauliString) -> usize {
        debug_assert!(self.rank() <= 63);
        self.generators
            .iter()
            .enumerate()
            .fold(0, |acc, (i, g)| acc | ((g.symplectic(e) as usize) << i))
    }

    /// Direct product with a group on disjoint support.
    pub fn direct_sum(&self, other: &PauliGroup) -> Result<PauliGroup> {
        let mut gens = self.generators.clone();
        gens.extend_from_slice(&other.generators);
        PauliGroup::new(self.n, gens)
    }

    /// True if the two groups contain the same elements.
    pub fn same_elements(&self, other: &PauliGroup) -> bool {
        self.rank() == other.rank() && other.generators.iter().all(|g| self.contains(g))
    }
}

fn check_n(n: usize, p: &PauliString) -> Result<()> {
    if p.num_qubits() != n {
        return Err(Error::QubitMismatch {
            expected: n,
            found: p.num_qubits(),
        });
    }
    Ok(())
}

impl fmt::Debug for PauliGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

impl PartialEq for PauliGroup {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.generators == other.generators
    }
}

/// Independent, pairwise commuting generators; at most n of them.
#[derive(Clone, PartialEq)]
pub struct StabilizerGroup {
    group: PauliGroup,
}

impl StabilizerGroup {
    pub fn new(n: usize, generators: Vec<PauliString>) -> Result<Self> {
        if generators.len() > n {
            return Err(Error::TooManyGenerators {
                n,
                count: generators.len(),
            });
        }
        Self::from_group(PauliGroup::new(n, generators)?)
    }

    pub fn from_group(group: PauliGroup) -> Result<Self> {
        if !group.is_isotropic() {
            return Err(Error::NotIsotropic);
        }
        Ok(StabilizerGroup { group })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let gens = super::string::parse_list(s)?;
        let n = gens.first().map(|g| g.num_qubits()).unwrap_or(0);
        StabilizerGroup::new(n, gens)
    }

    pub fn as_group(&self) -> &PauliGroup {
        &self.group
    }

    pub fn into_group(self) -> PauliGroup {
        self.group
    }
}

impl std::ops::Deref for StabilizerGroup {
    type Target = PauliGroup;
    fn deref(&self) -> &PauliGroup {
        &self.group
    }
}

impl fmt::Debug for StabilizerGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Stab{:?}", self.group)
    }
}

/// Bits `<g_i, e>` over a group's generator list; labels a coset of `C_G`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SyndromeVector {
    len: usize,
    words: Vec<u64>,
}

impl SyndromeVector {
    pub fn zeros(len: usize) -> Self {
        SyndromeVector {
            len,
            words: vec![0; len.div_ceil(64).max(1)],
        }
    }

    pub fn from_index(len: usize, idx: usize) -> Self {
        let mut s = SyndromeVector::zeros(len);
        s.words[0] = idx as u64;
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        gf2::bit(&self.words, i)
    }

    pub fn set(&mut self, i: usize, v: bool) {
        if self.get(i) != v {
            gf2::flip(&mut self.words, i);
        }
    }

    pub fn xor(&self, other: &SyndromeVector) -> SyndromeVector {
        assert_eq!(self.len, other.len);
        let mut out = self.clone();
        gf2::xor_into(&mut out.words, &other.words);
        out
    }

    /// Packed value, bit i for generator i.
    pub fn index(&self) -> usize {
        assert!(self.len <= 63, "syndrome too long to pack");
        self.words[0] as usize
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Display for SyndromeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for SyndromeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Syndrome({self})")
    }
}
