//! Dense GF(2) linear algebra on packed rows.

pub(crate) fn bit(row: &[u64], i: usize) -> bool {
    (row[i / 64] >> (i % 64)) & 1 == 1
}

pub(crate) fn flip(row: &mut [u64], i: usize) {
    row[i / 64] ^= 1 << (i % 64);
}

pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

#[cfg(test)]
fn dot(a: &[u64], b: &[u64]) -> bool {
    a.iter()
        .zip(b)
        .fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones())
        & 1
        == 1
}

pub(crate) fn is_zero(row: &[u64]) -> bool {
    row.iter().all(|&w| w == 0)
}

fn lowest_bit(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// Reduced row echelon form built incrementally. Every stored row keeps
/// track of which accepted inputs it is a combination of, so membership
/// queries can also return coordinates.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    width: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    combos: Vec<Vec<u64>>,
    accepted: usize,
    combo_words: usize,
}

impl Echelon {
    /// `width` is the row length in words, `max_rank` bounds the number of
    /// accepted inputs.
    pub fn new(width: usize, max_rank: usize) -> Self {
        Echelon {
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
            combos: Vec::new(),
            accepted: 0,
            combo_words: max_rank.div_ceil(64).max(1),
        }
    }

    #[cfg(test)]
    fn rank(&self) -> usize {
        self.accepted
    }

    /// Residual after elimination together with the combination of accepted
    /// inputs that was subtracted.
    pub fn reduce(&self, row: &[u64]) -> (Vec<u64>, Vec<u64>) {
        debug_assert_eq!(row.len(), self.width);
        let mut r = row.to_vec();
        let mut c = vec![0u64; self.combo_words];
        for (i, &p) in self.pivots.iter().enumerate() {
            if bit(&r, p) {
                xor_into(&mut r, &self.rows[i]);
                xor_into(&mut c, &self.combos[i]);
            }
        }
        (r, c)
    }

    pub fn contains(&self, row: &[u64]) -> bool {
        is_zero(&self.reduce(row).0)
    }

    /// Coordinates over the accepted inputs, if `row` lies in their span.
    pub fn coordinates(&self, row: &[u64]) -> Option<Vec<u64>> {
        let (r, c) = self.reduce(row);
        is_zero(&r).then_some(c)
    }

    /// Adds a row; returns false (and changes nothing) when it is dependent.
    pub fn insert(&mut self, row: &[u64]) -> bool {
        let (mut r, mut c) = self.reduce(row);
        let Some(p) = lowest_bit(&r) else {
            return false;
        };
        assert!(
            self.accepted < self.combo_words * 64,
            "echelon rank bound exceeded"
        );
        flip(&mut c, self.accepted);
        self.accepted += 1;
        // keep the form reduced: clear the new pivot from older rows
        for i in 0..self.rows.len() {
            if bit(&self.rows[i], p) {
                let (rows, combos) = (&mut self.rows, &mut self.combos);
                xor_into(&mut rows[i], &r);
                xor_into(&mut combos[i], &c);
            }
        }
        r.shrink_to_fit();
        self.rows.push(r);
        self.pivots.push(p);
        self.combos.push(c);
        true
    }

    /// Basis of `{v : row . v = 0 for every stored row}` with support on
    /// `columns`. Stored rows must vanish outside `columns`.
    pub fn null_space(&self, columns: impl IntoIterator<Item = usize>) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        for f in columns.into_iter().filter(|f| !self.pivots.contains(f)) {
            let mut v = vec![0u64; self.width];
            flip(&mut v, f);
            for (i, &p) in self.pivots.iter().enumerate() {
                if bit(&self.rows[i], f) {
                    flip(&mut v, p);
                }
            }
            out.push(v);
        }
        out
    }
}
