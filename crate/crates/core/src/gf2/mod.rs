//! Sparse linear algebra over GF(2).
//!
//! [`BinMatrix`] keeps both row and column adjacency lists so it can back a
//! Tanner graph directly. Elimination (rank, kernel, constrained solve)
//! runs on a bit-packed copy and is deterministic: pivots are taken in the
//! requested column order, lowest row index first.

mod alist;
pub(crate) mod dense;

pub use alist::{read_alist, write_alist};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use dense::{eliminate, BitRow};

/// Binary vector stored as its sorted support.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinVector {
    len: usize,
    support: Vec<usize>,
}

impl BinVector {
    pub fn zeros(len: usize) -> Self {
        BinVector {
            len,
            support: Vec::new(),
        }
    }

    /// Builds a vector from a list of one-positions. The list is sorted;
    /// duplicates and out-of-range indices are rejected.
    pub fn new(len: usize, mut support: Vec<usize>) -> Result<Self> {
        support.sort_unstable();
        if support.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate index in support".into()));
        }
        if let Some(&last) = support.last() {
            if last >= len {
                return Err(Error::InvalidArgument(format!(
                    "index {last} out of range for length {len}"
                )));
            }
        }
        Ok(BinVector { len, support })
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        BinVector {
            len: bits.len(),
            support: bits
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect(),
        }
    }

    pub fn from_u8(bits: &[u8]) -> Self {
        BinVector {
            len: bits.len(),
            support: bits
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| (b & 1 == 1).then_some(i))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn get(&self, i: usize) -> bool {
        self.support.binary_search(&i).is_ok()
    }

    pub fn to_bits(&self) -> Vec<bool> {
        let mut bits = vec![false; self.len];
        for &i in &self.support {
            bits[i] = true;
        }
        bits
    }

    pub fn to_u8(&self) -> Vec<u8> {
        self.to_bits().into_iter().map(u8::from).collect()
    }

    pub fn xor(&self, other: &BinVector) -> Result<BinVector> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                got: other.len,
                context: "vector xor",
            });
        }
        Ok(BinVector {
            len: self.len,
            support: sorted_symmetric_difference(&self.support, &other.support),
        })
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BinVector) -> bool {
        sorted_intersection_count(&self.support, &other.support) % 2 == 1
    }

    pub(crate) fn to_bitrow(&self) -> BitRow {
        BitRow::from_support(self.len, &self.support)
    }

    pub(crate) fn from_bitrow(len: usize, row: &BitRow) -> Self {
        BinVector {
            len,
            support: row.ones().collect(),
        }
    }
}

pub(crate) fn sorted_symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub(crate) fn sorted_intersection_count(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Sparse binary matrix with consistent row and column adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinMatrix {
    rows: usize,
    cols: usize,
    row_support: Vec<Vec<usize>>,
    col_support: Vec<Vec<usize>>,
}

impl BinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BinMatrix {
            rows,
            cols,
            row_support: vec![Vec::new(); rows],
            col_support: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows_unchecked(n, (0..n).map(|i| vec![i]).collect())
    }

    /// Builds a matrix from per-row one-positions. Rows are sorted; a
    /// repeated or out-of-range index is an error.
    pub fn from_row_support(cols: usize, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "row {r} lists a column twice"
                )));
            }
            if let Some(&c) = row.last() {
                if c >= cols {
                    return Err(Error::InvalidArgument(format!(
                        "row {r}: column {c} out of range for {cols} columns"
                    )));
                }
            }
        }
        Ok(Self::from_rows_unchecked(cols, rows))
    }

    /// Rows must already be sorted, duplicate-free and in range.
    fn from_rows_unchecked(cols: usize, row_support: Vec<Vec<usize>>) -> Self {
        let mut col_support = vec![Vec::new(); cols];
        for (r, row) in row_support.iter().enumerate() {
            for &c in row {
                col_support[c].push(r);
            }
        }
        BinMatrix {
            rows: row_support.len(),
            cols,
            row_support,
            col_support,
        }
    }

    /// Builds a matrix from rows where each entry is XOR-accumulated, so a
    /// column listed twice cancels.
    pub(crate) fn from_rows_xor(cols: usize, rows: Vec<Vec<usize>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|mut row| {
                row.sort_unstable();
                let mut out: Vec<usize> = Vec::with_capacity(row.len());
                for c in row {
                    if out.last() == Some(&c) {
                        out.pop();
                    } else {
                        out.push(c);
                    }
                }
                out
            })
            .collect();
        Self::from_rows_unchecked(cols, rows)
    }

    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("ragged dense matrix".into()));
        }
        Ok(Self::from_rows_unchecked(
            cols,
            rows.iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter_map(|(c, &b)| (b & 1 == 1).then_some(c))
                        .collect()
                })
                .collect(),
        ))
    }

    pub fn from_vectors(cols: usize, vectors: &[BinVector]) -> Result<Self> {
        for v in vectors {
            if v.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: v.len(),
                    context: "stacking vectors",
                });
            }
        }
        Ok(Self::from_rows_unchecked(
            cols,
            vectors.iter().map(|v| v.support().to_vec()).collect(),
        ))
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.row_support
            .iter()
            .map(|row| {
                let mut dense = vec![0u8; self.cols];
                for &c in row {
                    dense[c] = 1;
                }
                dense
            })
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.row_support[r]
    }

    pub fn col(&self, c: usize) -> &[usize] {
        &self.col_support[c]
    }

    pub fn row_vector(&self, r: usize) -> BinVector {
        BinVector {
            len: self.cols,
            support: self.row_support[r].clone(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.row_support.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.row_support[r].binary_search(&c).is_ok()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.row_support.iter().map(Vec::len).collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        self.col_support.iter().map(Vec::len).collect()
    }

    pub fn transpose(&self) -> BinMatrix {
        BinMatrix {
            rows: self.cols,
            cols: self.rows,
            row_support: self.col_support.clone(),
            col_support: self.row_support.clone(),
        }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &BinMatrix) -> Result<BinMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: other.rows,
                context: "hstack row count",
            });
        }
        let rows = self
            .row_support
            .iter()
            .zip(&other.row_support)
            .map(|(a, b)| {
                let mut row = a.clone();
                row.extend(b.iter().map(|&c| c + self.cols));
                row
            })
            .collect();
        Ok(Self::from_rows_unchecked(self.cols + other.cols, rows))
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &BinMatrix) -> Result<BinMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.cols,
                context: "vstack column count",
            });
        }
        let mut rows = self.row_support.clone();
        rows.extend(other.row_support.iter().cloned());
        Ok(Self::from_rows_unchecked(self.cols, rows))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &BinMatrix) -> BinMatrix {
        let mut rows = Vec::with_capacity(self.rows * other.rows);
        for a in &self.row_support {
            for b in &other.row_support {
                let mut row = Vec::with_capacity(a.len() * b.len());
                for &ca in a {
                    for &cb in b {
                        row.push(ca * other.cols + cb);
                    }
                }
                rows.push(row);
            }
        }
        Self::from_rows_unchecked(self.cols * other.cols, rows)
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BinMatrix) -> Result<BinMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
                context: "matrix product",
            });
        }
        let rows = self
            .row_support
            .iter()
            .map(|row| {
                row.iter()
                    .flat_map(|&k| other.row_support[k].iter().copied())
                    .collect()
            })
            .collect();
        Ok(Self::from_rows_xor(other.cols, rows))
    }

    pub fn is_zero(&self) -> bool {
        self.row_support.iter().all(Vec::is_empty)
    }

    pub fn matvec(&self, v: &BinVector) -> Result<BinVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
                context: "matvec",
            });
        }
        let mut bits = vec![false; self.rows];
        for &q in v.support() {
            for &r in &self.col_support[q] {
                bits[r] ^= true;
            }
        }
        Ok(BinVector::from_bits(&bits))
    }

    /// `matvec` on a dense bit slice, skipping the sparse-vector wrapper.
    pub fn matvec_bits(&self, bits: &[bool]) -> Result<Vec<bool>> {
        if bits.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: bits.len(),
                context: "matvec",
            });
        }
        Ok(self
            .row_support
            .iter()
            .map(|row| row.iter().filter(|&&c| bits[c]).count() % 2 == 1)
            .collect())
    }

    pub fn rank(&self) -> usize {
        let order: Vec<usize> = (0..self.cols).collect();
        eliminate(self, None, &order, false).rank()
    }

    /// Basis of `{v : self·v = 0}`, one vector per non-pivot column of the
    /// reduced echelon form.
    pub fn kernel_basis(&self) -> Vec<BinVector> {
        let order: Vec<usize> = (0..self.cols).collect();
        let ech = eliminate(self, None, &order, true);
        let is_pivot = ech.pivot_mask();
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut support = vec![free];
                for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                    if row.get(free) {
                        support.push(p);
                    }
                }
                support.sort_unstable();
                BinVector {
                    len: self.cols,
                    support,
                }
            })
            .collect()
    }

    /// Solves `self·e = s`, choosing pivot columns greedily along
    /// `pivot_order` and setting every non-pivot column to zero.
    pub fn solve_constrained(&self, s: &BinVector, pivot_order: &[usize]) -> Result<BinVector> {
        if s.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: s.len(),
                context: "solve right-hand side",
            });
        }
        check_permutation(pivot_order, self.cols)?;
        let ech = eliminate(self, Some(&s.to_bits()), pivot_order, true);
        if !ech.consistent {
            return Err(Error::Infeasible);
        }
        let support = ech
            .pivots
            .iter()
            .zip(&ech.rhs)
            .filter_map(|(&p, &b)| b.then_some(p))
            .collect();
        BinVector::new(self.cols, support)
    }

    /// True when `v` lies in the row space.
    pub fn row_space_contains(&self, v: &BinVector) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
                context: "row space membership",
            });
        }
        let order: Vec<usize> = (0..self.cols).collect();
        let ech = eliminate(self, None, &order, true);
        Ok(reduce_against(&ech, v.to_bitrow()).is_zero())
    }
}

/// Reduces `row` by the pivot rows of a fully reduced echelon form.
pub(crate) fn reduce_against(ech: &dense::Echelon, mut row: BitRow) -> BitRow {
    for (pivot_row, &p) in ech.rows.iter().zip(&ech.pivots) {
        if row.get(p) {
            row.xor_assign(pivot_row);
        }
    }
    row
}

pub(crate) fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: order.len(),
            context: "pivot order length",
        });
    }
    let mut seen = vec![false; n];
    for &c in order {
        if c >= n || std::mem::replace(&mut seen[c], true) {
            return Err(Error::InvalidArgument(
                "pivot order is not a permutation of the columns".into(),
            ));
        }
    }
    Ok(())
}
