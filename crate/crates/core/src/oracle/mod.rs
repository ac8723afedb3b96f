//! Brute-force ground truth at small n: dense matrices, Pauli twirls and
//! explicit enumeration of CB sequences. Nothing here is fast.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channel::PauliChannel;
use crate::error::{Error, Result};
use crate::pauli::{all_paulis, Pauli1, PauliString, StabilizerGroup};

pub type CMatrix = DMatrix<Complex64>;

/// Largest register for dense superoperators.
pub const ORACLE_CAP: usize = 6;
/// Largest register for sequence enumeration.
pub const TWIRL_CAP: usize = 4;
pub const BRUTE_FORCE_QUBITS: usize = 2;
pub const BRUTE_FORCE_LENGTH: u64 = 3;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn single(p: Pauli1) -> CMatrix {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        Pauli1::I => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli1::X => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli1::Y => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli1::Z => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Hermitian matrix of `p`; qubit 0 is the leftmost tensor factor.
pub fn pauli_matrix(p: &PauliString) -> CMatrix {
    (0..p.num_qubits()).fold(CMatrix::identity(1, 1), |acc, q| acc.kronecker(&single(p.get(q))))
}

fn dim_qubits(d: usize) -> Result<usize> {
    if !d.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("dimension {d} is not a power of two")));
    }
    let n = d.trailing_zeros() as usize;
    if n > ORACLE_CAP {
        return Err(Error::CapExceeded {
            what: "oracle qubits",
            value: n,
            cap: ORACLE_CAP,
        });
    }
    Ok(n)
}

/// `L(M) = sum_k A_k M B_k^dagger`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausPair {
    pub left: Vec<CMatrix>,
    pub right: Vec<CMatrix>,
}

impl KrausPair {
    pub fn new(left: Vec<CMatrix>, right: Vec<CMatrix>) -> Result<Self> {
        if left.len() != right.len() || left.is_empty() {
            return Err(Error::InvalidParameter("Kraus lists differ in length".into()));
        }
        let d = left[0].nrows();
        dim_qubits(d)?;
        if left.iter().chain(&right).any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(Error::InvalidParameter("Kraus operators of mixed dimension".into()));
        }
        Ok(KrausPair { left, right })
    }

    /// A completely positive map with `A_k = B_k`.
    pub fn cp(ops: Vec<CMatrix>) -> Result<Self> {
        Self::new(ops.clone(), ops)
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::cp(vec![u])
    }

    /// `sum_a sqrt(p_a) P_a`.
    pub fn from_pauli_channel(ch: &PauliChannel) -> Result<Self> {
        let n = ch.num_qubits();
        dim_qubits(1 << n)?;
        let rates = ch.to_dense()?;
        let ops = all_paulis(n)
            .zip(rates)
            .filter(|(_, r)| *r > 0.0)
            .map(|(p, r)| pauli_matrix(&p) * c(r.sqrt(), 0.0))
            .collect();
        Self::cp(ops)
    }

    pub fn dim(&self) -> usize {
        self.left[0].nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn apply(&self, m: &CMatrix) -> CMatrix {
        self.left
            .iter()
            .zip(&self.right)
            .fold(CMatrix::zeros(m.nrows(), m.ncols()), |acc, (a, b)| acc + a * m * b.adjoint())
    }

    /// `sum_k B_k^dagger A_k = I`, which makes `L` trace preserving.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        let s = self
            .left
            .iter()
            .zip(&self.right)
            .fold(CMatrix::zeros(self.dim(), self.dim()), |acc, (a, b)| acc + b.adjoint() * a);
        (s - CMatrix::identity(self.dim(), self.dim())).norm() <= tol
    }

    /// `L` followed by `other`.
    pub fn then(&self, other: &KrausPair) -> KrausPair {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (a2, b2) in other.left.iter().zip(&other.right) {
            for (a1, b1) in self.left.iter().zip(&self.right) {
                left.push(a2 * a1);
                right.push(b2 * b1);
            }
        }
        KrausPair { left, right }
    }
}

/// Coefficients `l_a = Tr(P_a M) / d` of `M = sum_a l_a P_a`.
pub fn pauli_expand(m: &CMatrix) -> Result<Vec<Complex64>> {
    let d = m.nrows();
    let n = dim_qubits(d)?;
    Ok(all_paulis(n)
        .map(|p| (pauli_matrix(&p) * m).trace() / d as f64)
        .collect())
}

/// Error rates of the twirled map, `p_a = sum_k l_{k,a} conj(r_{k,a})`.
/// Dense order; real, and nonnegative when the map is CP.
pub fn pauli_twirl(k: &KrausPair) -> Result<Vec<f64>> {
    if k.num_qubits() > TWIRL_CAP {
        return Err(Error::CapExceeded {
            what: "twirl qubits",
            value: k.num_qubits(),
            cap: TWIRL_CAP,
        });
    }
    let mut p = vec![0.0; k.dim() * k.dim()];
    for (a, b) in k.left.iter().zip(&k.right) {
        let l = pauli_expand(a)?;
        let r = pauli_expand(b)?;
        for (slot, (x, y)) in p.iter_mut().zip(l.iter().zip(&r)) {
            *slot += (x * y.conj()).re;
        }
    }
    Ok(p)
}

/// `(a|L|b) = Tr(P_a L(P_b)) / d` in dense Pauli order.
pub fn superoperator(k: &KrausPair) -> Result<CMatrix> {
    let d = k.dim();
    let n = dim_qubits(d)?;
    let paulis: Vec<CMatrix> = all_paulis(n).map(|p| pauli_matrix(&p)).collect();
    let dd = paulis.len();
    let mut out = CMatrix::zeros(dd, dd);
    for (j, pb) in paulis.iter().enumerate() {
        let image = k.apply(pb);
        for (i, pa) in paulis.iter().enumerate() {
            out[(i, j)] = (pa * &image).trace() / d as f64;
        }
    }
    Ok(out)
}

/// `f_a = (a|L|a)`.
pub fn pauli_eigenvalues(k: &KrausPair) -> Result<Vec<f64>> {
    let s = superoperator(k)?;
    Ok((0..s.nrows()).map(|i| s[(i, i)].re).collect())
}

fn projector(gens: &[PauliString], signs: usize, d: usize) -> CMatrix {
    let id = CMatrix::identity(d, d);
    gens.iter().enumerate().fold(id.clone(), |acc, (j, g)| {
        let s = if signs >> j & 1 == 1 { -1.0 } else { 1.0 };
        acc * ((&id + pauli_matrix(g) * c(s, 0.0)) * c(0.5, 0.0))
    })
}

/// Stabilizer state with `+1` eigenvalue on every generator.
pub fn stabilizer_state(g: &StabilizerGroup) -> CMatrix {
    let d = 1usize << g.num_qubits();
    let p = projector(g.generators(), 0, d);
    let tr = p.trace().re;
    p / c(tr, 0.0)
}

/// Projectors of the syndrome measurement, indexed by packed outcome bits
/// (generator 0 is the least significant bit).
pub fn syndrome_povm(h: &StabilizerGroup) -> Vec<CMatrix> {
    let d = 1usize << h.num_qubits();
    (0..1usize << h.rank())
        .map(|b| projector(h.generators(), b, d))
        .collect()
}

fn pauli_conjugate(ch: &PauliChannel, m: &CMatrix) -> Result<CMatrix> {
    let rates = ch.to_dense()?;
    let n = ch.num_qubits();
    Ok(all_paulis(n)
        .zip(rates)
        .filter(|(_, r)| *r != 0.0)
        .fold(CMatrix::zeros(m.nrows(), m.ncols()), |acc, (p, r)| {
            let pm = pauli_matrix(&p);
            acc + &pm * m * &pm * c(r, 0.0)
        }))
}

/// Outcome offset that maps the ideal outcome to zero: for every `h` in
/// `G ∩ H`, the ideal parity of its measured generators.
fn reference_outcome(g: &StabilizerGroup, h: &StabilizerGroup, rho: &CMatrix) -> Result<usize> {
    let d = rho.nrows();
    let k = h.rank();
    let mut constraints = Vec::new();
    for coords in 1..1usize << k {
        let el = h.element(coords);
        if !g.contains(&el) {
            continue;
        }
        // product of the measured generators, as an operator
        let prod = (0..k)
            .filter(|j| coords >> j & 1 == 1)
            .fold(CMatrix::identity(d, d), |acc, j| acc * pauli_matrix(&h.generators()[j]));
        let expect = (prod * rho).trace().re;
        constraints.push((coords, expect < 0.0));
    }
    (0..1usize << k)
        .find(|b0| {
            constraints
                .iter()
                .all(|&(coords, neg)| ((coords & b0).count_ones() % 2 == 1) == neg)
        })
        .ok_or_else(|| Error::InvalidParameter("inconsistent stabilizer signs".into()))
}

/// Noise for the brute-force model: a general gate map with Pauli SPAM.
#[derive(Clone, Debug)]
pub struct OracleModel {
    pub gate: KrausPair,
    pub prep: PauliChannel,
    pub meas: PauliChannel,
}

/// Outcome distribution of a length-m CB experiment by enumeration of all
/// `|P^n|^{m+1}` Pauli sequences, with dense states and POVMs.
pub fn brute_force_cb_distribution(
    g: &StabilizerGroup,
    h: &StabilizerGroup,
    m: u64,
    model: &OracleModel,
) -> Result<Vec<f64>> {
    let n = g.num_qubits();
    if n > BRUTE_FORCE_QUBITS || m > BRUTE_FORCE_LENGTH {
        return Err(Error::CapExceeded {
            what: "brute-force qubits or sequence length",
            value: n.max(m as usize),
            cap: BRUTE_FORCE_QUBITS.max(BRUTE_FORCE_LENGTH as usize),
        });
    }
    let rho_ideal = stabilizer_state(g);
    let b0 = reference_outcome(g, h, &rho_ideal)?;
    let rho = pauli_conjugate(&model.prep, &rho_ideal)?;
    let povm: Vec<CMatrix> = syndrome_povm(h)
        .iter()
        .map(|e| pauli_conjugate(&model.meas, e))
        .collect::<Result<_>>()?;
    let paulis: Vec<(PauliString, CMatrix)> = all_paulis(n).map(|p| {
        let mtx = pauli_matrix(&p);
        (p, mtx)
    }).collect();
    let mut out = vec![0.0; 1 << h.rank()];
    let weight = (paulis.len() as f64).powi(-(m as i32 + 1));
    enumerate(&rho, 0, PauliString::identity(n), m, model, &paulis, &mut |state, frame| {
        let s = h.syndrome_index(frame);
        for (b, e) in povm.iter().enumerate() {
            out[b ^ b0 ^ s] += weight * (e * state).trace().re;
        }
    });
    Ok(out)
}

fn enumerate(
    state: &CMatrix,
    step: u64,
    frame: PauliString,
    m: u64,
    model: &OracleModel,
    paulis: &[(PauliString, CMatrix)],
    visit: &mut dyn FnMut(&CMatrix, &PauliString),
) {
    let noisy = model.gate.apply(state);
    for (p, pm) in paulis {
        let next = pm * &noisy * pm;
        let f = frame.mul(p);
        if step == m {
            visit(&next, &f);
        } else {
            enumerate(&next, step + 1, f, m, model, paulis, visit);
        }
    }
}

/// SPAM coefficients for a general gate map, over the elements of `H` by
/// packed coordinates: `A_h = sum_b (-1)^{c(h).(b+b0)} (E_b|h)(h|L(rho))`.
pub fn dense_spam_coefficients(g: &StabilizerGroup, h: &StabilizerGroup, model: &OracleModel) -> Result<Vec<f64>> {
    let rho_ideal = stabilizer_state(g);
    let b0 = reference_outcome(g, h, &rho_ideal)?;
    let sigma = model.gate.apply(&pauli_conjugate(&model.prep, &rho_ideal)?);
    let povm: Vec<CMatrix> = syndrome_povm(h)
        .iter()
        .map(|e| pauli_conjugate(&model.meas, e))
        .collect::<Result<_>>()?;
    let d = sigma.nrows() as f64;
    Ok((0..1usize << h.rank())
        .map(|coords| {
            let ph = pauli_matrix(&h.element(coords));
            let right = (&ph * &sigma).trace().re;
            povm.iter()
                .enumerate()
                .map(|(b, e)| {
                    let sign = if (coords & (b ^ b0)).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                    sign * (e * &ph).trace().re * right / d
                })
                .sum()
        })
        .collect())
}

/// Exact distances between two dense rate vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// Diamond distance between the two Pauli channels, `l1 / 2`.
    pub diamond: f64,
}

pub fn exact_norms(p: &[f64], q: &[f64]) -> Result<Norms> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    if p.len() > 1 << 20 {
        return Err(Error::CapExceeded {
            what: "entries for exact norms",
            value: p.len(),
            cap: 1 << 20,
        });
    }
    let diff = p.iter().zip(q).map(|(a, b)| (a - b).abs());
    let l1: f64 = diff.clone().sum();
    Ok(Norms {
        l1,
        l2: diff.clone().map(|x| x * x).sum::<f64>().sqrt(),
        linf: diff.fold(0.0, f64::max),
        diamond: l1 / 2.0,
    })
}

/// `exp(-i theta (n . sigma) / 2)` on one qubit.
pub fn rotation(theta: f64, axis: [f64; 3]) -> CMatrix {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [x, y, z] = axis.map(|a| a / norm);
    let gen = single(Pauli1::X) * c(x, 0.0) + single(Pauli1::Y) * c(y, 0.0) + single(Pauli1::Z) * c(z, 0.0);
    CMatrix::identity(2, 2) * c((theta / 2.0).cos(), 0.0) - gen * c(0.0, (theta / 2.0).sin())
}

/// A random unitary near the identity: single-qubit rotations by angles up
/// to `max_angle` followed by `exp(-i phi Z Z / 2)` on neighbours.
pub fn random_coherent_unitary<R: Rng + ?Sized>(n: usize, max_angle: f64, rng: &mut R) -> CMatrix {
    let mut u = CMatrix::identity(1, 1);
    for _ in 0..n {
        let axis: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(rng));
        u = u.kronecker(&rotation(rng.random::<f64>() * max_angle, axis));
    }
    for q in 0..n.saturating_sub(1) {
        let phi = rng.random::<f64>() * max_angle;
        let mut zz = PauliString::identity(n);
        zz.set(q, Pauli1::Z);
        zz.set(q + 1, Pauli1::Z);
        let d = 1usize << n;
        let gate = CMatrix::identity(d, d) * c((phi / 2.0).cos(), 0.0) - pauli_matrix(&zz) * c(0.0, (phi / 2.0).sin());
        u = gate * u;
    }
    u
}
