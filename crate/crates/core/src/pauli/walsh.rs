//! Walsh-Hadamard transforms over Pauli sets.

use std::ops::{Add, Sub};

use super::group::PauliGroup;
use super::string::PauliString;
use crate::error::{Error, Result};

pub trait WhScalar: Copy + Default + Add<Output = Self> + Sub<Output = Self> {}

impl WhScalar for f64 {}
impl WhScalar for i64 {}
impl WhScalar for i128 {}

/// In-place `v[s] <- sum_t (-1)^{popcount(s & t)} v[t]` over `2^k` entries.
pub fn fwht<T: WhScalar>(v: &mut [T]) {
    let len = v.len();
    assert!(len.is_power_of_two(), "fwht length must be a power of two");
    let mut h = 1;
    while h < len {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// `out[i] = sum_j (-1)^{<a_i, b_j>} v[j]`.
///
/// Takes an O(k 2^k) route when both sides are the same list and that
/// list is exactly a group of order `2^k`; otherwise sums directly.
pub fn wh_apply<T: WhScalar>(a_set: &[PauliString], b_set: &[PauliString], v: &[T]) -> Result<Vec<T>> {
    if v.len() != b_set.len() {
        return Err(Error::LengthMismatch {
            expected: b_set.len(),
            found: v.len(),
        });
    }
    if a_set == b_set {
        if let Some(out) = wh_group(a_set, v) {
            return Ok(out);
        }
    }
    Ok(wh_direct(a_set, b_set, v))
}

pub fn wh_direct<T: WhScalar>(a_set: &[PauliString], b_set: &[PauliString], v: &[T]) -> Vec<T> {
    a_set
        .iter()
        .map(|a| {
            b_set.iter().zip(v).fold(T::default(), |acc, (b, &x)| {
                if a.symplectic(b) {
                    acc - x
                } else {
                    acc + x
                }
            })
        })
        .collect()
}

fn wh_group<T: WhScalar>(set: &[PauliString], v: &[T]) -> Option<Vec<T>> {
    let n = set.first()?.num_qubits();
    if !set.len().is_power_of_two() {
        return None;
    }
    let group = PauliGroup::span(n, set).ok()?;
    if 1usize.checked_shl(group.rank() as u32)? != set.len() || group.rank() > 30 {
        return None;
    }
    let mut coords = Vec::with_capacity(set.len());
    let mut seen = vec![false; set.len()];
    for p in set {
        let c = group.coordinate_index(p)?;
        if std::mem::replace(&mut seen[c], true) {
            return None;
        }
        coords.push(c);
    }
    let mut w = vec![T::default(); set.len()];
    for (&c, &x) in coords.iter().zip(v) {
        w[c] = x;
    }
    fwht(&mut w);
    // <a, b> = beta . s(a) where s(a) is the syndrome of a over the basis
    Some(set.iter().map(|a| w[group.syndrome_index(a)]).collect())
}

/// `out[g] = sum_a (-1)^{<g, a>} v[a]` over all 4^n Paulis in dense order.
pub fn dense_pauli_transform(v: &mut [f64]) {
    let len = v.len();
    assert!(
        len.is_power_of_two() && len.trailing_zeros() % 2 == 0,
        "dense vector length must be 4^n"
    );
    let mut stride = 1;
    while stride < len {
        for base in (0..len).step_by(4 * stride) {
            for off in base..base + stride {
                let i = v[off];
                let x = v[off + stride];
                let y = v[off + 2 * stride];
                let z = v[off + 3 * stride];
                // rows of the single-qubit kernel in I, X, Y, Z order
                v[off] = i + x + y + z;
                v[off + stride] = i + x - y - z;
                v[off + 2 * stride] = i - x + y - z;
                v[off + 3 * stride] = i - x - y + z;
            }
        }
        stride *= 4;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::string::{all_paulis, parse_list};

    #[test]
    fn single_qubit_example() {
        let set = parse_list("I, X, Y, Z").unwrap();
        let out = wh_apply(&set, &set, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(out, vec![1.0; 4]);
        let out = wh_apply(&set, &set, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(out, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn fast_and_direct_agree_on_integers() {
        let set: Vec<_> = all_paulis(3).collect();
        let v: Vec<i64> = (0..64).map(|i| (i * 37 % 11) as i64 - 5).collect();
        assert_eq!(
            wh_apply(&set, &set, &v).unwrap(),
            wh_direct(&set, &set, &v)
        );
        let mut dense: Vec<f64> = v.iter().map(|&x| x as f64).collect();
        dense_pauli_transform(&mut dense);
        let direct: Vec<f64> = wh_direct(&set, &set, &v).iter().map(|&x| x as f64).collect();
        assert_eq!(dense, direct);
    }

    #[test]
    fn length_mismatch() {
        let set = parse_list("I, X").unwrap();
        assert!(wh_apply(&set, &set, &[1.0]).is_err());
    }
}
