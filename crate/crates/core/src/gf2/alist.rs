//! MacKay "alist" text format.
//!
//! ```text
//! cols rows
//! max_col_degree max_row_degree
//! <degree of each column>
//! <degree of each row>
//! <one line per column: 1-based row indices, zero padded>
//! <one line per row: 1-based column indices, zero padded>
//! ```

use std::fmt::Write as _;

use super::BinMatrix;
use crate::error::{Error, Result};

pub fn write_alist(m: &BinMatrix) -> String {
    let col_w = m.col_weights();
    let row_w = m.row_weights();
    let max_col = col_w.iter().copied().max().unwrap_or(0);
    let max_row = row_w.iter().copied().max().unwrap_or(0);
    let mut out = String::new();
    let join = |v: &[usize]| {
        v.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    };
    let padded = |entries: &[usize], width: usize| {
        let mut v: Vec<usize> = entries.iter().map(|&i| i + 1).collect();
        v.resize(width, 0);
        join(&v)
    };
    let _ = writeln!(out, "{} {}", m.cols(), m.rows());
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(out, "{}", join(&col_w));
    let _ = writeln!(out, "{}", join(&row_w));
    for c in 0..m.cols() {
        let _ = writeln!(out, "{}", padded(m.col(c), max_col));
    }
    for r in 0..m.rows() {
        let _ = writeln!(out, "{}", padded(m.row(r), max_row));
    }
    out
}

pub fn read_alist(text: &str) -> Result<BinMatrix> {
    let mut tokens = text.split_whitespace();
    let mut take = |count: usize, what: &str| -> Result<Vec<usize>> {
        (0..count)
            .map(|_| {
                let t = tokens
                    .next()
                    .ok_or_else(|| Error::Parse(format!("alist: truncated {what}")))?;
                t.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("alist: bad number `{t}` in {what}: {e}")))
            })
            .collect()
    };
    let dims = take(2, "dimensions")?;
    let (cols, rows) = (dims[0], dims[1]);
    let max = take(2, "maximum degrees")?;
    let (max_col, max_row) = (max[0], max[1]);
    let col_deg = take(cols, "column degrees")?;
    let row_deg = take(rows, "row degrees")?;
    let mut from_cols: Vec<(usize, usize)> = Vec::new();
    for (c, &deg) in col_deg.iter().enumerate() {
        let nonzero: Vec<usize> = take(max_col, "column list")?
            .into_iter()
            .filter(|&r| r != 0)
            .collect();
        if nonzero.len() != deg {
            return Err(Error::Parse(format!(
                "alist: column {c} lists {} entries, degree says {deg}",
                nonzero.len()
            )));
        }
        for r in nonzero {
            if r > rows {
                return Err(Error::Parse(format!("alist: row index {r} out of range")));
            }
            from_cols.push((r - 1, c));
        }
    }
    let mut row_lists = Vec::with_capacity(rows);
    for (r, &deg) in row_deg.iter().enumerate() {
        let nonzero: Vec<usize> = take(max_row, "row list")?
            .into_iter()
            .filter(|&c| c != 0)
            .map(|c| c - 1)
            .collect();
        if nonzero.len() != deg {
            return Err(Error::Parse(format!(
                "alist: row {r} lists {} entries, degree says {deg}",
                nonzero.len()
            )));
        }
        row_lists.push(nonzero);
    }
    let m = BinMatrix::from_row_support(cols, row_lists)?;
    from_cols.sort_unstable();
    let mut from_rows: Vec<(usize, usize)> = (0..m.rows())
        .flat_map(|r| m.row(r).iter().map(move |&c| (r, c)))
        .collect();
    from_rows.sort_unstable();
    if from_cols != from_rows {
        return Err(Error::Parse(
            "alist: column lists and row lists disagree".into(),
        ));
    }
    Ok(m)
}
