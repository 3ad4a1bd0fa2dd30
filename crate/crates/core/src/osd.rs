//! Ordered statistics post-processing (OSD-0 and combination sweep).
//!
//! Columns are eliminated least reliable first, so the pivot (information)
//! set collects the qubits BP is least sure about. Non-pivot qubits keep
//! their BP hard decision and the pivots are solved to match the syndrome.
//! Soft cost of a candidate `e` is `Σ_{e_q = 1} L(q)`, lower is better.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::dense::{eliminate, BitRow};
use crate::gf2::{BinMatrix, BinVector};

pub const DEFAULT_SWEEP_DEPTH: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum OsdConfig {
    Osd0,
    OsdCs { sweep_depth: usize },
}

impl Default for OsdConfig {
    fn default() -> Self {
        OsdConfig::Osd0
    }
}

impl OsdConfig {
    pub fn combination_sweep() -> Self {
        OsdConfig::OsdCs {
            sweep_depth: DEFAULT_SWEEP_DEPTH,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OsdConfig::OsdCs { sweep_depth: 0 } => {
                Err(Error::InvalidArgument("osd_cs sweep_depth must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Column order used for elimination: ascending `|L(q)|`, ties by index.
pub fn reliability_order(llrs: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..llrs.len()).collect();
    order.sort_by(|&a, &b| llrs[a].abs().total_cmp(&llrs[b].abs()).then(a.cmp(&b)));
    order
}

pub fn soft_cost(e: &BinVector, llrs: &[f64]) -> f64 {
    e.support().iter().map(|&q| llrs[q]).sum()
}

pub fn osd_postprocess(h: &BinMatrix, syndrome: &BinVector, llrs: &[f64], cfg: &OsdConfig) -> Result<BinVector> {
    cfg.validate()?;
    if llrs.len() != h.cols() {
        return Err(Error::DimensionMismatch {
            expected: h.cols(),
            got: llrs.len(),
            context: "LLR count vs columns",
        });
    }
    if syndrome.len() != h.rows() {
        return Err(Error::DimensionMismatch {
            expected: h.rows(),
            got: syndrome.len(),
            context: "syndrome length vs rows",
        });
    }
    let order = reliability_order(llrs);
    let ech = eliminate(h, Some(&syndrome.to_bits()), &order, true);
    if !ech.consistent {
        return Err(Error::Infeasible);
    }
    let is_pivot = ech.pivot_mask();
    let n = h.cols();

    // Non-pivot assignment: BP hard decisions.
    let mut fixed = BitRow::zeros(n);
    for q in 0..n {
        if !is_pivot[q] && llrs[q] < 0.0 {
            fixed.flip(q);
        }
    }
    let solve = |fixed: &BitRow| -> Vec<bool> {
        ech.rows
            .iter()
            .zip(&ech.rhs)
            .map(|(row, &b)| b ^ row.dot(fixed))
            .collect()
    };
    let pivot_bits = solve(&fixed);
    let assemble = |fixed: &BitRow, pivot_bits: &[bool]| -> BinVector {
        let mut support: Vec<usize> = fixed.ones().collect();
        support.extend(ech.pivots.iter().zip(pivot_bits).filter_map(|(&p, &b)| b.then_some(p)));
        support.sort_unstable();
        BinVector::new(n, support).expect("indices in range")
    };

    let sweep_depth = match *cfg {
        OsdConfig::Osd0 => return Ok(assemble(&fixed, &pivot_bits)),
        OsdConfig::OsdCs { sweep_depth } => sweep_depth,
    };

    // Candidate flips: the least reliable non-pivot columns.
    let sweep: Vec<usize> = order.iter().copied().filter(|&q| !is_pivot[q]).take(sweep_depth).collect();
    let rank = ech.rank();
    // Column j of the reduced system, as a bit row over pivot rows.
    let columns: Vec<BitRow> = sweep
        .iter()
        .map(|&j| {
            let hits: Vec<usize> = (0..rank).filter(|&r| ech.rows[r].get(j)).collect();
            BitRow::from_support(rank, &hits)
        })
        .collect();
    let base_pivots = BitRow::from_support(
        rank,
        &pivot_bits.iter().enumerate().filter_map(|(r, &b)| b.then_some(r)).collect::<Vec<_>>(),
    );
    let pivot_cost = |bits: &BitRow| -> f64 { bits.ones().map(|r| llrs[ech.pivots[r]]).sum() };
    let flip_delta = |j: usize| -> f64 {
        if fixed.get(j) {
            -llrs[j]
        } else {
            llrs[j]
        }
    };
    let fixed_cost: f64 = fixed.ones().map(|q| llrs[q]).sum();

    let mut best_cost = fixed_cost + pivot_cost(&base_pivots);
    let mut best: Option<(usize, Option<usize>)> = None;
    for a in 0..sweep.len() {
        let mut with_a = base_pivots.clone();
        with_a.xor_assign(&columns[a]);
        let cost_a = fixed_cost + flip_delta(sweep[a]);
        let c = cost_a + pivot_cost(&with_a);
        if c < best_cost {
            best_cost = c;
            best = Some((a, None));
        }
        for b in a + 1..sweep.len() {
            let mut with_ab = with_a.clone();
            with_ab.xor_assign(&columns[b]);
            let c = cost_a + flip_delta(sweep[b]) + pivot_cost(&with_ab);
            if c < best_cost {
                best_cost = c;
                best = Some((a, Some(b)));
            }
        }
    }
    let Some((a, b)) = best else {
        return Ok(assemble(&fixed, &pivot_bits));
    };
    let mut flipped = fixed.clone();
    flipped.flip(sweep[a]);
    if let Some(b) = b {
        flipped.flip(sweep[b]);
    }
    let bits = solve(&flipped);
    Ok(assemble(&flipped, &bits))
}
