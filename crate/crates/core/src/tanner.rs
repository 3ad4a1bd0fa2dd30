//! Mutable Tanner graph with check splitting.
//!
//! Edges are numbered once, at construction, and keep their id for the life
//! of the graph; a split only moves some of a check's edges to a new check.
//! Per-edge message buffers therefore stay valid across splits.
//!
//! Adjacency lives in flat arrays. Each check owns a contiguous range of
//! slots; a split reorders its range so the kept neighbors come first and
//! hands the tail to the new check, so no slot ever moves between ranges.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BinMatrix, BinVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckNode {
    pub id: usize,
    pub syndrome: bool,
    pub split_child: bool,
    start: usize,
    len: usize,
}

impl CheckNode {
    pub fn degree(&self) -> usize {
        self.len
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckOrigin {
    /// Row of the parity matrix the graph was built from.
    Row(usize),
    /// Created by splitting the check with this id.
    SplitOf(usize),
}

#[derive(Clone, Debug)]
pub struct TannerGraph {
    n_vars: usize,
    n_original: usize,
    checks: Vec<CheckNode>,
    /// Variable of each slot; sorted within every check's range.
    slot_var: Vec<usize>,
    /// Edge of each slot, parallel to `slot_var`.
    slot_edge: Vec<usize>,
    /// `var_adj[var_start[v]..var_start[v + 1]]`: (check id, edge id) pairs
    /// of variable `v`, ordered by edge id.
    var_start: Vec<usize>,
    var_adj: Vec<(usize, usize)>,
    /// Per edge: (check id, var id).
    edges: Vec<(usize, usize)>,
    origin: Vec<CheckOrigin>,
}

impl TannerGraph {
    pub fn from_parity(h: &BinMatrix, syndrome: &BinVector) -> Result<Self> {
        if syndrome.len() != h.rows() {
            return Err(Error::DimensionMismatch {
                expected: h.rows(),
                got: syndrome.len(),
                context: "syndrome length vs check count",
            });
        }
        let n_edges = h.nnz();
        let mut edges = Vec::with_capacity(n_edges);
        let mut slot_var = Vec::with_capacity(n_edges);
        let mut checks = Vec::with_capacity(h.rows());
        let mut syn = syndrome.support().iter().peekable();
        for r in 0..h.rows() {
            let start = slot_var.len();
            for &v in h.row(r) {
                edges.push((r, v));
                slot_var.push(v);
            }
            let bit = syn.next_if_eq(&&r).is_some();
            checks.push(CheckNode {
                id: r,
                syndrome: bit,
                split_child: false,
                start,
                len: slot_var.len() - start,
            });
        }
        let mut var_start = vec![0; h.cols() + 1];
        for &(_, v) in &edges {
            var_start[v + 1] += 1;
        }
        for v in 0..h.cols() {
            var_start[v + 1] += var_start[v];
        }
        let mut fill = var_start.clone();
        let mut var_adj = vec![(0, 0); n_edges];
        for (e, &(c, v)) in edges.iter().enumerate() {
            var_adj[fill[v]] = (c, e);
            fill[v] += 1;
        }
        Ok(TannerGraph {
            n_vars: h.cols(),
            n_original: h.rows(),
            checks,
            slot_var,
            slot_edge: (0..n_edges).collect(),
            var_start,
            var_adj,
            edges,
            origin: (0..h.rows()).map(CheckOrigin::Row).collect(),
        })
    }

    /// Copy of an unsplit graph with a different syndrome. Cheaper than
    /// rebuilding from the parity matrix.
    pub fn with_syndrome(&self, syndrome: &BinVector) -> Result<Self> {
        if self.checks.len() != self.n_original {
            return Err(Error::Graph("with_syndrome needs an unsplit graph".into()));
        }
        if syndrome.len() != self.n_original {
            return Err(Error::DimensionMismatch {
                expected: self.n_original,
                got: syndrome.len(),
                context: "syndrome length vs check count",
            });
        }
        let mut g = self.clone();
        for c in &mut g.checks {
            c.syndrome = false;
        }
        for &r in syndrome.support() {
            g.checks[r].syndrome = true;
        }
        Ok(g)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.checks.len()
    }

    /// Number of checks the graph was built with.
    pub fn n_original_checks(&self) -> usize {
        self.n_original
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn checks(&self) -> &[CheckNode] {
        &self.checks
    }

    pub fn check(&self, id: usize) -> &CheckNode {
        &self.checks[id]
    }

    /// Sorted variable ids of a check.
    pub fn check_vars(&self, check: usize) -> &[usize] {
        let c = &self.checks[check];
        &self.slot_var[c.start..c.start + c.len]
    }

    /// Edge ids of a check, parallel to [`Self::check_vars`].
    pub fn check_edges(&self, check: usize) -> &[usize] {
        let c = &self.checks[check];
        &self.slot_edge[c.start..c.start + c.len]
    }

    /// (check id, edge id) pairs of a variable, ordered by edge id.
    pub fn var_adj(&self, v: usize) -> &[(usize, usize)] {
        &self.var_adj[self.var_start[v]..self.var_start[v + 1]]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn origin(&self, check: usize) -> CheckOrigin {
        self.origin[check]
    }

    /// Row of the original parity matrix a check descends from.
    pub fn root_row(&self, mut check: usize) -> usize {
        loop {
            match self.origin[check] {
                CheckOrigin::Row(r) => return r,
                CheckOrigin::SplitOf(parent) => check = parent,
            }
        }
    }

    pub fn syndrome_bits(&self) -> Vec<bool> {
        self.checks.iter().map(|c| c.syndrome).collect()
    }

    /// Replaces `check` by `c1` (keeps the id; neighbors `part1`, syndrome
    /// `s1`) and a new check `c2` holding the remaining neighbors with
    /// syndrome `s ⊕ s1`. Returns `(c1, c2)`.
    pub fn split_check(&mut self, check: usize, part1: &[usize], s1: bool) -> Result<(usize, usize)> {
        let node = self
            .checks
            .get(check)
            .ok_or_else(|| Error::Graph(format!("no check with id {check}")))?;
        if node.split_child {
            return Err(Error::Graph(format!("check {check} is already a split child")));
        }
        let mut part1 = part1.to_vec();
        part1.sort_unstable();
        part1.dedup();
        if part1.is_empty() || part1.len() >= node.degree() {
            return Err(Error::Graph(format!(
                "part1 must be a proper nonempty subset of check {check}'s {} neighbors",
                node.degree()
            )));
        }
        let (start, len, original) = (node.start, node.len, node.syndrome);
        let vars = &self.slot_var[start..start + len];
        if let Some(&v) = part1.iter().find(|v| vars.binary_search(v).is_err()) {
            return Err(Error::Graph(format!("variable {v} is not a neighbor of check {check}")));
        }

        // Stable partition of the range: kept neighbors first.
        let slots: Vec<(usize, usize)> = vars.iter().copied().zip(self.slot_edge[start..start + len].iter().copied()).collect();
        let (keep, moved): (Vec<_>, Vec<_>) = slots.into_iter().partition(|(v, _)| part1.binary_search(v).is_ok());
        let c2 = self.checks.len();
        for (i, &(v, e)) in keep.iter().chain(&moved).enumerate() {
            self.slot_var[start + i] = v;
            self.slot_edge[start + i] = e;
        }
        for &(v, e) in &moved {
            self.edges[e].0 = c2;
            let (lo, hi) = (self.var_start[v], self.var_start[v + 1]);
            for slot in &mut self.var_adj[lo..hi] {
                if slot.1 == e {
                    slot.0 = c2;
                }
            }
        }
        let c1 = &mut self.checks[check];
        c1.len = keep.len();
        c1.syndrome = s1;
        c1.split_child = true;
        self.checks.push(CheckNode {
            id: c2,
            syndrome: original ^ s1,
            split_child: true,
            start: start + keep.len(),
            len: moved.len(),
        });
        self.origin.push(CheckOrigin::SplitOf(check));
        Ok((check, c2))
    }

    /// Whether the check has odd overlap with a sorted support.
    pub fn anticommutes(&self, check: usize, x_check_support: &[usize]) -> bool {
        crate::gf2::sorted_intersection_count(self.check_vars(check), x_check_support) % 2 == 1
    }

    /// Per-check `parity(estimate on neighbors) ⊕ syndrome`, and the number
    /// of mismatching checks `d = |s − ŝ|`.
    pub fn effective_syndrome_residual(&self, estimate: &BinVector) -> Result<(usize, Vec<bool>)> {
        if estimate.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: estimate.len(),
                context: "estimate length vs variable count",
            });
        }
        Ok(self.residual_bits(&estimate.to_bits()))
    }

    fn parity(&self, c: &CheckNode, hard: &[bool]) -> bool {
        self.slot_var[c.start..c.start + c.len].iter().filter(|&&v| hard[v]).count() % 2 == 1
    }

    pub(crate) fn residual_bits(&self, hard: &[bool]) -> (usize, Vec<bool>) {
        let bits: Vec<bool> = self.checks.iter().map(|c| self.parity(c, hard) ^ c.syndrome).collect();
        (bits.iter().filter(|&&b| b).count(), bits)
    }

    pub(crate) fn mismatch_count(&self, hard: &[bool]) -> usize {
        self.checks.iter().filter(|c| self.parity(c, hard) != c.syndrome).count()
    }

    /// Graphviz rendering for debugging. Checks are boxes labelled with
    /// their syndrome; split children are dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph tanner {\n");
        for v in 0..self.n_vars {
            let _ = writeln!(out, "  q{v} [shape=circle];");
        }
        for c in &self.checks {
            let style = if c.split_child { ",style=dashed" } else { "" };
            let _ = writeln!(out, "  c{} [shape=box,label=\"c{} s={}\"{style}];", c.id, c.id, c.syndrome as u8);
        }
        for &(c, v) in &self.edges {
            let _ = writeln!(out, "  c{c} -- q{v};");
        }
        out.push_str("}\n");
        out
    }
}
