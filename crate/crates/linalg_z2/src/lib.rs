//! Exact linear algebra over the two-element field.
//!
//! Matrices are dense and bit-packed row by row. All the queries the strand
//! engine needs (rank, kernel, preimage with a column restriction) are exact
//! and deterministic: when a system has several solutions, [`BitMatrix::solve`]
//! returns the lexicographically least or greatest one, comparing coordinates
//! starting from column 0.

use std::fmt;

use thiserror::Error;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A fixed-length vector over Z/2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; words_for(len)] }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Inner product over Z/2.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones() & 1;
        }
        acc == 1
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "BitVec({s})")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("right-hand side is not in the image of the restricted matrix")]
    NoSolution,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },
}

/// Which element of an affine solution set to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extremal {
    #[default]
    Least,
    Greatest,
}

/// Dense matrix over Z/2.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix { rows, cols, data: vec![BitVec::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[BitVec]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(LinalgError::Shape { expected: rows, found: c.len() });
            }
            for i in c.ones() {
                m.set(i, j, true);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::Shape { expected: self.cols, found: x.len() });
        }
        let mut out = BitVec::zeros(self.rows);
        for (r, row) in self.data.iter().enumerate() {
            if row.dot(x) {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// Restriction to a subset of columns, in the order given.
    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    m.set(r, j, true);
                }
            }
        }
        m
    }

    /// Reduced row echelon form; returns the reduced matrix and pivot columns.
    fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            let Some(p) = (next..self.rows).find(|&r| m.data[r].get(c)) else {
                continue;
            };
            m.data.swap(next, p);
            let pivot_row = m.data[next].clone();
            for r in 0..self.rows {
                if r != next && m.data[r].get(c) {
                    m.data[r].xor_assign(&pivot_row);
                }
            }
            pivots.push(c);
            next += 1;
            if next == self.rows {
                break;
            }
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of the null space, in reduced echelon form keyed by lowest set bit.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let (m, pivots) = self.rref();
        let mut is_pivot = vec![None; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(r);
        }
        let raw: Vec<BitVec> = (0..self.cols)
            .filter(|&f| is_pivot[f].is_none())
            .map(|f| {
                let mut v = BitVec::zeros(self.cols);
                v.set(f, true);
                for (r, &c) in pivots.iter().enumerate() {
                    if m.data[r].get(f) {
                        v.set(c, true);
                    }
                }
                v
            })
            .collect();
        echelonize(raw)
    }

    /// Solves `self * x = b` with `x` supported on `allowed` (all columns when
    /// `None`), returning the extremal solution in lexicographic order.
    pub fn solve(
        &self,
        b: &BitVec,
        allowed: Option<&[usize]>,
        which: Extremal,
    ) -> Result<BitVec, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::Shape { expected: self.rows, found: b.len() });
        }
        let cols: Vec<usize> = match allowed {
            Some(a) => {
                let mut a = a.to_vec();
                a.sort_unstable();
                a.dedup();
                a
            }
            None => (0..self.cols).collect(),
        };
        let sub = self.select_columns(&cols);
        let n = cols.len();

        // Augment with b as an extra column and reduce.
        let mut aug = BitMatrix::zeros(self.rows, n + 1);
        for r in 0..self.rows {
            for c in 0..n {
                if sub.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            if b.get(r) {
                aug.set(r, n, true);
            }
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&n) {
            return Err(LinalgError::NoSolution);
        }
        let mut x = BitVec::zeros(n);
        for (r, &c) in pivots.iter().enumerate() {
            if red.data[r].get(n) {
                x.set(c, true);
            }
        }
        for k in sub.kernel_basis() {
            let lead = k.first_one().expect("kernel vectors are nonzero");
            let want = which == Extremal::Greatest;
            if x.get(lead) != want {
                x.xor_assign(&k);
            }
        }
        let mut full = BitVec::zeros(self.cols);
        for (j, &c) in cols.iter().enumerate() {
            if x.get(j) {
                full.set(c, true);
            }
        }
        Ok(full)
    }

    /// True when `b` lies in the column span.
    pub fn in_image(&self, b: &BitVec) -> bool {
        self.solve(b, None, Extremal::Least).is_ok()
    }
}

/// Puts a list of vectors into fully reduced echelon form keyed by the lowest
/// set bit, dropping dependent vectors.
fn echelonize(mut vs: Vec<BitVec>) -> Vec<BitVec> {
    let mut basis: Vec<BitVec> = Vec::new();
    for v in vs.drain(..) {
        let mut v = v;
        for b in &basis {
            let lead = b.first_one().unwrap();
            if v.get(lead) {
                v.xor_assign(b);
            }
        }
        if v.is_zero() {
            continue;
        }
        let lead = v.first_one().unwrap();
        for b in basis.iter_mut() {
            if b.get(lead) {
                b.xor_assign(&v);
            }
        }
        basis.push(v);
    }
    basis.sort_by_key(|b| b.first_one());
    basis
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for row in &self.data {
            let s: String = (0..self.cols).map(|i| if row.get(i) { '1' } else { '0' }).collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}
