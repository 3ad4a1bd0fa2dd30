//! Bit-packed rows and Gauss-Jordan elimination used by the rank, kernel,
//! solver and OSD paths.

use super::BinMatrix;

const WORD: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow {
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut row = Self::zeros(len);
        for &i in support {
            row.flip(i);
        }
        row
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD] ^= 1 << (i % WORD);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the bitwise AND with `other`.
    #[inline]
    pub fn dot(&self, other: &BitRow) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }
}

/// Row-reduced echelon form of a matrix (optionally augmented with a
/// right-hand side), with pivots chosen greedily along a column order.
///
/// Row `r` of `rows` has a 1 in column `pivots[r]` and a 0 in every other
/// pivot column.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    pub cols: usize,
    pub rows: Vec<BitRow>,
    pub pivots: Vec<usize>,
    pub rhs: Vec<bool>,
    pub consistent: bool,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Marks pivot columns.
    pub fn pivot_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.cols];
        for &p in &self.pivots {
            mask[p] = true;
        }
        mask
    }
}

/// Gauss-Jordan elimination. Columns are visited in `col_order`; for each,
/// the lowest-index remaining row holding a 1 becomes the pivot row. With
/// `full` unset only rows below the pivot are cleared (enough for rank).
pub(crate) fn eliminate(
    m: &BinMatrix,
    rhs: Option<&[bool]>,
    col_order: &[usize],
    full: bool,
) -> Echelon {
    let mut rows: Vec<BitRow> = (0..m.rows())
        .map(|r| BitRow::from_support(m.cols(), m.row(r)))
        .collect();
    let mut rhs: Vec<bool> = match rhs {
        Some(s) => s.to_vec(),
        None => vec![false; m.rows()],
    };
    let mut pivots = Vec::new();
    let mut rank = 0;
    for &col in col_order {
        if rank == rows.len() {
            break;
        }
        let Some(found) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, found);
        rhs.swap(rank, found);
        let (head, tail) = rows.split_at_mut(rank);
        let (pivot_row, below) = tail.split_first_mut().expect("pivot row exists");
        let pivot_rhs = rhs[rank];
        for (offset, row) in below.iter_mut().enumerate() {
            if row.get(col) {
                row.xor_assign(pivot_row);
                rhs[rank + 1 + offset] ^= pivot_rhs;
            }
        }
        if full {
            for (r, row) in head.iter_mut().enumerate() {
                if row.get(col) {
                    row.xor_assign(pivot_row);
                    rhs[r] ^= pivot_rhs;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let consistent = rhs[rank..].iter().all(|&b| !b);
    rows.truncate(rank);
    rhs.truncate(rank);
    Echelon {
        cols: m.cols(),
        rows,
        pivots,
        rhs,
        consistent,
    }
}
