//! Dense tables over the Pauli alphabet of a list of variables. The first
//! variable is the most significant base-4 digit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Largest variable count for a dense joint table.
pub const TABLE_CAP: usize = 10;

/// A distribution (or estimate) over the Paulis on `vars`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalMarginal {
    pub vars: Vec<usize>,
    pub table: Vec<f64>,
}

impl LocalMarginal {
    pub fn new(vars: Vec<usize>, table: Vec<f64>) -> Result<Self> {
        if vars.len() > TABLE_CAP {
            return Err(Error::CapExceeded {
                what: "variables in a dense table",
                value: vars.len(),
                cap: TABLE_CAP,
            });
        }
        if table.len() != 1 << (2 * vars.len()) {
            return Err(Error::LengthMismatch {
                expected: 1 << (2 * vars.len()),
                found: table.len(),
            });
        }
        Ok(LocalMarginal { vars, table })
    }

    /// Marginal of a dense distribution over all `n` variables.
    pub fn from_dense(p: &[f64], n: usize, vars: &[usize]) -> Result<Self> {
        let all: Vec<usize> = (0..n).collect();
        Ok(LocalMarginal {
            vars: vars.to_vec(),
            table: marginalize(p, &all, vars)?,
        })
    }

    pub fn marginal(&self, sub: &[usize]) -> Result<Vec<f64>> {
        marginalize(&self.table, &self.vars, sub)
    }

    pub fn prob(&self, x: &PauliString) -> f64 {
        self.table[local_index(x, &self.vars)]
    }
}

/// Dense index of `x` restricted to `vars`.
pub fn local_index(x: &PauliString, vars: &[usize]) -> usize {
    vars.iter().fold(0, |acc, &q| (acc << 2) | x.get(q).digit())
}

/// Base-4 digit of position `pos` in an index over `len` variables.
#[inline]
pub fn digit(idx: usize, pos: usize, len: usize) -> usize {
    (idx >> (2 * (len - 1 - pos))) & 3
}

/// Sums `table` over `vars` down to `sub`, returned in the order of `sub`.
pub fn marginalize(table: &[f64], vars: &[usize], sub: &[usize]) -> Result<Vec<f64>> {
    let pos: Vec<usize> = sub
        .iter()
        .map(|q| {
            vars.iter()
                .position(|v| v == q)
                .ok_or_else(|| Error::InvalidParameter(format!("variable {q} not in {vars:?}")))
        })
        .collect::<Result<_>>()?;
    let len = vars.len();
    let mut out = vec![0.0; 1 << (2 * sub.len())];
    for (i, &x) in table.iter().enumerate() {
        let j = pos.iter().fold(0, |acc, &p| (acc << 2) | digit(i, p, len));
        out[j] += x;
    }
    Ok(out)
}
