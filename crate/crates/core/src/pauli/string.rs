use std::cmp::Ordering;
use std::fmt;
use std::ops::{BitXor, BitXorAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

pub(crate) type Words = SmallVec<[u64; 2]>;

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

/// Single-qubit Pauli label. The discriminant is the dense digit used for
/// 4^n indexing, so `I < X < Y < Z` matches string order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli1 {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli1 {
    pub const ALL: [Pauli1; 4] = [Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli1::I,
            (true, false) => Pauli1::X,
            (true, true) => Pauli1::Y,
            (false, true) => Pauli1::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli1::I => (false, false),
            Pauli1::X => (true, false),
            Pauli1::Y => (true, true),
            Pauli1::Z => (false, true),
        }
    }

    pub fn from_digit(d: usize) -> Self {
        Pauli1::ALL[d & 3]
    }

    pub fn digit(self) -> usize {
        self as usize
    }

    pub fn as_char(self) -> char {
        ['I', 'X', 'Y', 'Z'][self as usize]
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' | '_' => Some(Pauli1::I),
            'X' | 'x' => Some(Pauli1::X),
            'Y' | 'y' => Some(Pauli1::Y),
            'Z' | 'z' => Some(Pauli1::Z),
            _ => None,
        }
    }
}

/// An n-qubit Pauli operator modulo phase, stored as packed x and z bits.
///
/// Qubit 0 is the leftmost character of the text form and the most
/// significant digit of the dense index.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Words,
    z: Words,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString {
            n,
            x: smallvec![0; w],
            z: smallvec![0; w],
        }
    }

    /// Builds from raw bit words; bits at positions `>= n` must be clear.
    pub fn from_words(n: usize, x: &[u64], z: &[u64]) -> Self {
        let w = words_for(n);
        assert!(x.len() == w && z.len() == w, "word count mismatch");
        let p = PauliString {
            n,
            x: SmallVec::from_slice(x),
            z: SmallVec::from_slice(z),
        };
        debug_assert!(p.tail_clear());
        p
    }

    pub fn single(n: usize, qubit: usize, p: Pauli1) -> Self {
        let mut s = Self::identity(n);
        s.set(qubit, p);
        s
    }

    pub fn from_paulis(ps: &[Pauli1]) -> Self {
        let mut s = Self::identity(ps.len());
        for (q, &p) in ps.iter().enumerate() {
            s.set(q, p);
        }
        s
    }

    /// Inverse of [`PauliString::dense_index`].
    pub fn from_dense_index(n: usize, mut idx: usize) -> Self {
        let mut s = Self::identity(n);
        for q in (0..n).rev() {
            s.set(q, Pauli1::from_digit(idx & 3));
            idx >>= 2;
        }
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn get(&self, q: usize) -> Pauli1 {
        assert!(q < self.n, "qubit {q} out of range for n = {}", self.n);
        let (w, b) = (q / 64, q % 64);
        Pauli1::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, q: usize, p: Pauli1) {
        assert!(q < self.n, "qubit {q} out of range for n = {}", self.n);
        let (w, b) = (q / 64, q % 64);
        let (xb, zb) = p.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
    }

    /// Toggles the bits of qubit `q` by a single-qubit Pauli (group product).
    pub fn mul_qubit(&mut self, q: usize, p: Pauli1) {
        let (w, b) = (q / 64, q % 64);
        let (xb, zb) = p.bits();
        self.x[w] ^= (xb as u64) << b;
        self.z[w] ^= (zb as u64) << b;
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(self.z.iter()).all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(self.z.iter())
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.get(q) != Pauli1::I).collect()
    }

    /// Symplectic form `a_x . b_z + a_z . b_x mod 2`; true means anticommuting.
    pub fn symplectic(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.n, other.n);
        let mut acc = 0u32;
        for i in 0..self.x.len() {
            acc ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones();
        }
        acc & 1 == 1
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        !self.symplectic(other)
    }

    /// `(-1)^{<self, other>}`.
    pub fn sign(&self, other: &PauliString) -> f64 {
        if self.symplectic(other) {
            -1.0
        } else {
            1.0
        }
    }

    pub fn mul(&self, other: &PauliString) -> PauliString {
        let mut out = self.clone();
        out ^= other;
        out
    }

    /// Base-4 index with qubit 0 as the most significant digit. Panics if
    /// the index does not fit a `usize`.
    pub fn dense_index(&self) -> usize {
        assert!(self.n <= 31, "dense index needs n <= 31, got {}", self.n);
        (0..self.n).fold(0usize, |acc, q| (acc << 2) | self.get(q).digit())
    }

    /// Restriction to the listed qubits, returned as a |qubits|-qubit string.
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let mut out = PauliString::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            out.set(i, self.get(q));
        }
        out
    }

    /// Places a local string onto `qubits` of an n-qubit register.
    pub fn embed(local: &PauliString, qubits: &[usize], n: usize) -> PauliString {
        assert_eq!(local.n, qubits.len());
        let mut out = PauliString::identity(n);
        for (i, &q) in qubits.iter().enumerate() {
            out.set(q, local.get(i));
        }
        out
    }

    /// Concatenated `[x | z]` words, used by the GF(2) routines.
    pub(crate) fn to_row(&self) -> Vec<u64> {
        let mut r = Vec::with_capacity(2 * self.x.len());
        r.extend_from_slice(&self.x);
        r.extend_from_slice(&self.z);
        r
    }

    pub(crate) fn from_row(n: usize, row: &[u64]) -> PauliString {
        let w = words_for(n);
        PauliString::from_words(n, &row[..w], &row[w..2 * w])
    }

    /// The row whose ordinary dot product with `a.to_row()` equals `<a, self>`.
    pub(crate) fn to_dual_row(&self) -> Vec<u64> {
        let mut r = Vec::with_capacity(2 * self.x.len());
        r.extend_from_slice(&self.z);
        r.extend_from_slice(&self.x);
        r
    }

    fn tail_clear(&self) -> bool {
        let rem = self.n % 64;
        if rem == 0 {
            return true;
        }
        let mask = !((1u64 << rem) - 1);
        let last = words_for(self.n) - 1;
        self.x[last] & mask == 0 && self.z[last] & mask == 0
    }
}

impl BitXorAssign<&PauliString> for PauliString {
    fn bitxor_assign(&mut self, rhs: &PauliString) {
        debug_assert_eq!(self.n, rhs.n);
        for i in 0..self.x.len() {
            self.x[i] ^= rhs.x[i];
            self.z[i] ^= rhs.z[i];
        }
    }
}

impl BitXor for &PauliString {
    type Output = PauliString;
    fn bitxor(self, rhs: &PauliString) -> PauliString {
        self.mul(rhs)
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for q in 0..self.n {
                match self.get(q).cmp(&other.get(q)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 0 {
            return f.write_str("-");
        }
        for q in 0..self.n {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" {
            return Ok(PauliString::identity(0));
        }
        let mut ps = Vec::with_capacity(s.len());
        for c in s.chars() {
            ps.push(Pauli1::from_char(c).ok_or_else(|| Error::ParsePauli(s.to_string()))?);
        }
        if ps.is_empty() {
            return Err(Error::ParsePauli(s.to_string()));
        }
        Ok(PauliString::from_paulis(&ps))
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a comma or whitespace separated list such as `"XI, IZ"`.
pub fn parse_list(s: &str) -> Result<Vec<PauliString>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

/// All 4^n strings in dense (string) order.
pub fn all_paulis(n: usize) -> impl Iterator<Item = PauliString> {
    assert!(n <= 15, "refusing to enumerate 4^{n} Paulis");
    (0..1usize << (2 * n)).map(move |i| PauliString::from_dense_index(n, i))
}
