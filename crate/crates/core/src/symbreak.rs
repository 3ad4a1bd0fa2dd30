//! SymBreak: BP rounds interleaved with syndrome splits.
//!
//! Each round runs `m` BP iterations on the live (split) graph and measures
//! the mismatch `d = |s − ŝ|`. `d = 0` ends decoding; otherwise a stagnation
//! counter `K` is updated and, unless it reached `k_max`, the least reliable
//! opposite-type check `g` is located and one check overlapping it evenly is
//! split into two children that each overlap `g` oddly. The split removes
//! the symmetry between `e` and `e ⊕ g` that keeps BP undecided.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bp::{BpConfig, BpState, Engine};
use crate::codes::{CssCode, ErrorType};
use crate::error::{Error, Result};
use crate::gf2::{sorted_intersection_count, BinMatrix, BinVector};
use crate::osd::{osd_postprocess, OsdConfig};
use crate::tanner::TannerGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitStrategy {
    BpGuided,
    SyndromeGuided,
    BbLayered,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SymBreakConfig {
    /// BP iterations per round.
    pub m: usize,
    pub k_max: usize,
    pub max_splits: usize,
    /// `None` picks `bb_layered` for BB codes and `syndrome_guided`
    /// otherwise.
    pub split_strategy: Option<SplitStrategy>,
    /// `bp.max_iters` bounds the total number of BP iterations over all
    /// rounds.
    pub bp: BpConfig,
    pub reset_messages_on_split: bool,
    /// Run OSD on the final LLRs when decoding stops unconverged. Off by
    /// default; for ablations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub osd_rescue: Option<OsdConfig>,
}

impl Default for SymBreakConfig {
    fn default() -> Self {
        let (m, max_splits) = (10, 50);
        SymBreakConfig {
            m,
            k_max: 3,
            max_splits,
            split_strategy: None,
            bp: BpConfig {
                max_iters: m * (max_splits + 1),
                ..BpConfig::default()
            },
            reset_messages_on_split: true,
            osd_rescue: None,
        }
    }
}

impl SymBreakConfig {
    pub fn validate(&self, n_vars: usize) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        if self.k_max == 0 {
            return Err(Error::InvalidArgument("k_max must be at least 1".into()));
        }
        if let Some(osd) = &self.osd_rescue {
            osd.validate()?;
        }
        self.bp.validate(n_vars)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    SyndromeMatched,
    KThreshold,
    /// Split count or total iteration budget exhausted.
    SplitBudget,
    /// Every candidate check adjacent to an unreliable opposite-type check
    /// is already a split child.
    NoSplitTarget,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::SyndromeMatched => "syndrome_matched",
            StopReason::KThreshold => "k_threshold",
            StopReason::SplitBudget => "split_budget",
            StopReason::NoSplitTarget => "no_split_target",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub round: usize,
    /// Row of the opposite-type matrix whose degeneracy is broken.
    pub gx_row: usize,
    /// Split check; keeps its id as the first child.
    pub z_check: usize,
    /// Id of the second child.
    pub new_check: usize,
    pub part1: Vec<usize>,
    pub s1: bool,
    pub method: SplitStrategy,
    pub d_before: usize,
    pub d_after: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    pub estimate: BinVector,
    pub converged: bool,
    pub bp_iterations_total: usize,
    pub splits: Vec<SplitRecord>,
    #[serde(rename = "wall_time_us", serialize_with = "ser_micros", deserialize_with = "de_micros")]
    pub wall_time: Duration,
    pub stop_reason: StopReason,
    /// `d` at the end of every round.
    pub d_trajectory: Vec<usize>,
    /// Set when the estimate came from the optional OSD rescue.
    #[serde(default)]
    pub osd_rescued: bool,
}

fn ser_micros<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e6)
}

fn de_micros<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Duration, D::Error> {
    let us = f64::deserialize(d)?;
    Ok(Duration::from_secs_f64(us.max(0.0) / 1e6))
}

/// Stagnation monitor over successive mismatch counts.
#[derive(Clone, Debug)]
pub struct KCounter {
    k: usize,
    k_max: usize,
    prev: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KStep {
    Matched,
    Continue,
    Threshold,
}

impl KCounter {
    pub fn new(k_max: usize) -> Self {
        KCounter { k: 0, k_max, prev: None }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The first observation only records `d`. Later ones increment `K`
    /// when `d` did not decrease and decrement it (down to 0) when it did.
    pub fn observe(&mut self, d: usize) -> KStep {
        if d == 0 {
            return KStep::Matched;
        }
        if let Some(prev) = self.prev {
            if d >= prev {
                self.k += 1;
            } else if self.k > 0 {
                self.k -= 1;
            }
        }
        self.prev = Some(d);
        if self.k >= self.k_max {
            KStep::Threshold
        } else {
            KStep::Continue
        }
    }
}

/// Mean `|L(q)|` over each row's support; empty rows get `+∞`.
pub fn check_reliability(state: &BpState, opposite_h: &BinMatrix) -> Vec<f64> {
    (0..opposite_h.rows())
        .map(|r| mean_abs(&state.llr, opposite_h.row(r)))
        .collect()
}

fn mean_abs(llr: &[f64], support: &[usize]) -> f64 {
    if support.is_empty() {
        return f64::INFINITY;
    }
    support.iter().map(|&q| llr[q].abs()).sum::<f64>() / support.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitTarget {
    pub gx_row: usize,
    pub z_check: usize,
}

/// Least reliable opposite-type check that still has an unsplit check with
/// even overlap ≥ 2; among those checks, the least reliable (lowest id on
/// ties).
pub fn select_split_target(
    reliabilities: &[f64],
    g: &TannerGraph,
    opposite_h: &BinMatrix,
    state: &BpState,
) -> Option<SplitTarget> {
    let mut order: Vec<usize> = (0..reliabilities.len()).collect();
    order.sort_by(|&a, &b| reliabilities[a].total_cmp(&reliabilities[b]).then(a.cmp(&b)));
    let mut overlap: HashMap<usize, usize> = HashMap::new();
    for gx_row in order {
        overlap.clear();
        for &q in opposite_h.row(gx_row) {
            for &(c, _) in g.var_adj(q) {
                *overlap.entry(c).or_default() += 1;
            }
        }
        let best = overlap
            .iter()
            .filter(|&(&c, &count)| count >= 2 && count % 2 == 0 && !g.check(c).split_child)
            .map(|(&c, _)| (mean_abs(&state.llr, g.check_vars(c)), c))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if let Some((_, z_check)) = best {
            return Some(SplitTarget { gx_row, z_check });
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPlan {
    pub part1: Vec<usize>,
    pub s1: bool,
    pub method: SplitStrategy,
}

fn even_overlap(g: &TannerGraph, check: usize, gx_support: &[usize]) -> Result<Vec<usize>> {
    let overlap: Vec<usize> = g
        .check_vars(check)
        .iter()
        .copied()
        .filter(|q| gx_support.binary_search(q).is_ok())
        .collect();
    if overlap.len() < 2 || overlap.len() % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "check {check} overlaps the target in {} qubits; need an even count ≥ 2",
            overlap.len()
        )));
    }
    Ok(overlap)
}

/// Most reliable first, lowest index on ties.
fn by_reliability_desc(qubits: &mut [usize], llr: &[f64]) {
    qubits.sort_by(|&a, &b| llr[b].abs().total_cmp(&llr[a].abs()).then(a.cmp(&b)));
}

fn hard_parity(qubits: &[usize], llr: &[f64]) -> bool {
    qubits.iter().filter(|&&q| llr[q] < 0.0).count() % 2 == 1
}

pub fn plan_split_bp_guided(g: &TannerGraph, z_check: usize, gx_support: &[usize], state: &BpState) -> Result<SplitPlan> {
    let mut overlap = even_overlap(g, z_check, gx_support)?;
    let k = overlap.len() / 2;
    let take = if k % 2 == 1 { k } else { k - 1 };
    by_reliability_desc(&mut overlap, &state.llr);
    let mut part1: Vec<usize> = overlap[..take].to_vec();
    let mut rest: Vec<usize> = g
        .check_vars(z_check)
        .iter()
        .copied()
        .filter(|q| gx_support.binary_search(q).is_err())
        .collect();
    by_reliability_desc(&mut rest, &state.llr);
    let half = g.check(z_check).degree() / 2;
    part1.extend(rest.into_iter().take(half.saturating_sub(take)));
    part1.sort_unstable();
    let s1 = hard_parity(&part1, &state.llr);
    Ok(SplitPlan {
        part1,
        s1,
        method: SplitStrategy::BpGuided,
    })
}

/// True when every check other than `skip` touching `side` has syndrome 0.
fn side_is_quiet(g: &TannerGraph, skip: usize, side: &[usize]) -> bool {
    side.iter()
        .flat_map(|&q| g.var_adj(q))
        .all(|&(c, _)| c == skip || !g.check(c).syndrome)
}

fn complement(all: &[usize], part: &[usize]) -> Vec<usize> {
    all.iter().copied().filter(|q| part.binary_search(q).is_err()).collect()
}

/// Visits size-`r` subsets of `0..n` in lexicographic order until `f`
/// returns a value.
fn first_combination<T>(n: usize, r: usize, mut f: impl FnMut(&[usize]) -> Option<T>) -> Option<T> {
    if r > n {
        return None;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        if let Some(t) = f(&idx) {
            return Some(t);
        }
        let mut i = r;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] != i + n - r {
                break;
            }
            if i == 0 {
                return None;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Balanced halves with odd overlap are tried in lexicographic order; the
/// first one with a side whose other adjacent checks are all quiet assigns
/// that side syndrome 0. Falls back to the BP-guided plan.
pub fn plan_split_syndrome_guided(
    g: &TannerGraph,
    z_check: usize,
    gx_support: &[usize],
    state: &BpState,
) -> Result<SplitPlan> {
    even_overlap(g, z_check, gx_support)?;
    let nb = g.check_vars(z_check);
    let found = first_combination(nb.len(), nb.len() / 2, |idx| {
        let part: Vec<usize> = idx.iter().map(|&i| nb[i]).collect();
        if sorted_intersection_count(&part, gx_support) % 2 == 0 {
            return None;
        }
        if side_is_quiet(g, z_check, &part) {
            return Some(part);
        }
        let other = complement(nb, &part);
        side_is_quiet(g, z_check, &other).then_some(other)
    });
    match found {
        Some(part1) => Ok(SplitPlan {
            part1,
            s1: false,
            method: SplitStrategy::SyndromeGuided,
        }),
        None => plan_split_bp_guided(g, z_check, gx_support, state),
    }
}

/// Left-block / right-block split of a BB check. The syndrome goes by the
/// quiet-side rule, else by the hard-decision parity of the left half.
pub fn plan_split_bb_layered(
    g: &TannerGraph,
    z_check: usize,
    gx_support: &[usize],
    state: &BpState,
    n: usize,
) -> Result<SplitPlan> {
    let nb = g.check_vars(z_check);
    let part1: Vec<usize> = nb.iter().copied().filter(|&q| q < n / 2).collect();
    if part1.len() != 3 || nb.len() != 6 {
        return Err(Error::InvalidArgument(format!(
            "check {z_check} is not a 3 + 3 BB check"
        )));
    }
    if sorted_intersection_count(&part1, gx_support) % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "left half of check {z_check} overlaps the target evenly"
        )));
    }
    let other = complement(nb, &part1);
    let s1 = if side_is_quiet(g, z_check, &part1) {
        false
    } else if side_is_quiet(g, z_check, &other) {
        g.check(z_check).syndrome
    } else {
        hard_parity(&part1, &state.llr)
    };
    Ok(SplitPlan {
        part1,
        s1,
        method: SplitStrategy::BbLayered,
    })
}

/// Shortest cycle length in the bipartite graph with the given check
/// adjacency, or `None` for a forest.
pub fn bipartite_girth(check_adj: &[Vec<usize>], n_vars: usize) -> Option<usize> {
    let n_checks = check_adj.len();
    let total = n_checks + n_vars;
    let mut adj = vec![Vec::new(); total];
    for (c, vars) in check_adj.iter().enumerate() {
        for &v in vars {
            adj[c].push(n_checks + v);
            adj[n_checks + v].push(c);
        }
    }
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; total];
    let mut parent = vec![usize::MAX; total];
    let mut queue = std::collections::VecDeque::new();
    for src in 0..total {
        dist.fill(usize::MAX);
        dist[src] = 0;
        parent[src] = usize::MAX;
        queue.clear();
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            if 2 * dist[u] + 1 >= best {
                break;
            }
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    best = best.min(dist[u] + dist[w] + 1);
                }
            }
        }
    }
    (best != usize::MAX).then_some(best)
}

/// Whether the layered split is structurally sound for checks of type `t`:
/// every check is 3 + 3 across the column blocks, the left-block subgraph
/// has girth 6, and every left half overlaps each adjacent opposite-type
/// check oddly.
pub fn layered_split_valid(code: &CssCode, t: ErrorType) -> bool {
    if !code.is_bivariate_bicycle() {
        return false;
    }
    let h = code.checks_for(t);
    let half = code.n / 2;
    let left: Vec<Vec<usize>> = (0..h.rows())
        .map(|r| h.row(r).iter().copied().filter(|&q| q < half).collect())
        .collect();
    if (0..h.rows()).any(|r| h.row(r).len() != 6 || left[r].len() != 3) {
        return false;
    }
    if bipartite_girth(&left, half) != Some(6) {
        return false;
    }
    let opp = code.stabilizers_for(t);
    (0..h.rows()).all(|r| {
        let mut adjacent: Vec<usize> = h.row(r).iter().flat_map(|&q| opp.col(q).iter().copied()).collect();
        adjacent.sort_unstable();
        adjacent.dedup();
        adjacent
            .iter()
            .all(|&x| sorted_intersection_count(&left[r], opp.row(x)) % 2 == 1)
    })
}

/// SymBreak bound to one code, with the split strategy resolved per error
/// type.
#[derive(Clone, Debug)]
pub struct SymBreakDecoder<'a> {
    code: &'a CssCode,
    cfg: SymBreakConfig,
    strategy_x: SplitStrategy,
    strategy_z: SplitStrategy,
    /// Unsplit graphs with zero syndrome, copied at the start of a decode.
    base_x: TannerGraph,
    base_z: TannerGraph,
}

impl<'a> SymBreakDecoder<'a> {
    pub fn new(code: &'a CssCode, cfg: SymBreakConfig) -> Result<Self> {
        cfg.validate(code.n)?;
        let resolve = |t: ErrorType| match cfg.split_strategy {
            Some(SplitStrategy::BbLayered) | None if code.is_bivariate_bicycle() => {
                if layered_split_valid(code, t) {
                    SplitStrategy::BbLayered
                } else {
                    log::warn!(
                        "{}: layered split failed validation for {t:?} errors; using syndrome_guided",
                        code.label
                    );
                    SplitStrategy::SyndromeGuided
                }
            }
            Some(SplitStrategy::BbLayered) => {
                log::warn!("{}: not a BB code; bb_layered downgraded to syndrome_guided", code.label);
                SplitStrategy::SyndromeGuided
            }
            None => SplitStrategy::SyndromeGuided,
            Some(s) => s,
        };
        let strategy_x = resolve(ErrorType::X);
        let strategy_z = resolve(ErrorType::Z);
        let base = |t: ErrorType| {
            let h = code.checks_for(t);
            TannerGraph::from_parity(h, &BinVector::zeros(h.rows()))
        };
        Ok(SymBreakDecoder {
            code,
            cfg,
            strategy_x,
            strategy_z,
            base_x: base(ErrorType::X)?,
            base_z: base(ErrorType::Z)?,
        })
    }

    pub fn config(&self) -> &SymBreakConfig {
        &self.cfg
    }

    pub fn strategy(&self, t: ErrorType) -> SplitStrategy {
        match t {
            ErrorType::X => self.strategy_x,
            ErrorType::Z => self.strategy_z,
        }
    }

    pub fn decode(&self, syndrome: &BinVector, t: ErrorType) -> Result<DecodeOutcome> {
        let start = Instant::now();
        let mut out = self.run(syndrome, t, true)?;
        out.wall_time = start.elapsed();
        Ok(out)
    }

    /// [`Self::decode`] without the diagnostics: `wall_time` stays zero and
    /// `d_trajectory` empty. For callers that time the call themselves and
    /// only need the estimate.
    pub(crate) fn decode_lean(&self, syndrome: &BinVector, t: ErrorType) -> Result<DecodeOutcome> {
        self.run(syndrome, t, false)
    }

    fn run(&self, syndrome: &BinVector, t: ErrorType, record: bool) -> Result<DecodeOutcome> {
        let code = self.code;
        let cfg = &self.cfg;
        let h = code.checks_for(t);
        let opposite = code.stabilizers_for(t);
        let strategy = self.strategy(t);
        let prior = &cfg.bp.prior_llr;

        let base = match t {
            ErrorType::X => &self.base_x,
            ErrorType::Z => &self.base_z,
        };
        let mut g = base.with_syndrome(syndrome)?;
        let mut state = BpState::new(&g, prior);
        let mut engine = Engine::new(&g);
        let budget = cfg.bp.max_iters;
        let mut used = 0;
        let mut counter = KCounter::new(cfg.k_max);
        let mut splits: Vec<SplitRecord> = Vec::new();
        let mut d_trajectory = Vec::new();
        let mut rounds = 0;
        let mut best: Option<(usize, Vec<bool>)> = None;

        let stop_reason = loop {
            let round = rounds;
            rounds += 1;
            let iters = cfg.m.min(budget - used);
            let (done, matched) = engine.iterate(&g, &cfg.bp, &mut state, iters, true, None);
            used += done;
            let d = if matched { 0 } else { g.mismatch_count(&engine.hard) };
            if record {
                d_trajectory.push(d);
            }
            if let Some(last) = splits.last_mut() {
                last.d_after = d;
            }
            if d > 0 && best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, engine.hard.clone()));
            }
            match counter.observe(d) {
                KStep::Matched => break StopReason::SyndromeMatched,
                KStep::Threshold => break StopReason::KThreshold,
                KStep::Continue => {}
            }
            if splits.len() >= cfg.max_splits || used >= budget {
                break StopReason::SplitBudget;
            }
            let rel = check_reliability(&state, opposite);
            let Some(target) = select_split_target(&rel, &g, opposite, &state) else {
                break StopReason::NoSplitTarget;
            };
            let gx = opposite.row(target.gx_row);
            let plan = match strategy {
                SplitStrategy::BpGuided => plan_split_bp_guided(&g, target.z_check, gx, &state)?,
                SplitStrategy::SyndromeGuided => plan_split_syndrome_guided(&g, target.z_check, gx, &state)?,
                SplitStrategy::BbLayered => plan_split_bb_layered(&g, target.z_check, gx, &state, code.n)
                    .or_else(|_| plan_split_syndrome_guided(&g, target.z_check, gx, &state))?,
            };
            let (_, new_check) = g.split_check(target.z_check, &plan.part1, plan.s1)?;
            splits.push(SplitRecord {
                round,
                gx_row: target.gx_row,
                z_check: target.z_check,
                new_check,
                part1: plan.part1,
                s1: plan.s1,
                method: plan.method,
                d_before: d,
                d_after: d,
            });
            if cfg.reset_messages_on_split {
                state = BpState {
                    iteration: state.iteration,
                    ..BpState::new(&g, prior)
                };
            }
        };

        let converged = stop_reason == StopReason::SyndromeMatched;
        let mut osd_rescued = false;
        let estimate = if converged {
            let est = BinVector::from_bits(&engine.hard);
            // Without splits the live graph is the original one, which the
            // engine has already checked.
            if !splits.is_empty() && h.matvec(&est)? != *syndrome {
                return Err(Error::Invariant(
                    "split-graph solution does not satisfy the original syndrome".into(),
                ));
            }
            est
        } else if let Some(osd) = &cfg.osd_rescue {
            osd_rescued = true;
            osd_postprocess(h, syndrome, &state.llr, osd)?
        } else {
            BinVector::from_bits(&best.expect("at least one round").1)
        };
        Ok(DecodeOutcome {
            estimate,
            converged: converged || osd_rescued,
            bp_iterations_total: used,
            splits,
            wall_time: Duration::ZERO,
            stop_reason,
            d_trajectory,
            osd_rescued,
        })
    }
}

/// One-shot convenience wrapper around [`SymBreakDecoder`].
pub fn decode(code: &CssCode, syndrome: &BinVector, cfg: &SymBreakConfig, t: ErrorType) -> Result<DecodeOutcome> {
    SymBreakDecoder::new(code, cfg.clone())?.decode(syndrome, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::prior_from_error_rate;
    use crate::codes::CodeFamily;

    fn gadget_code() -> CssCode {
        let h = BinMatrix::from_dense(&[vec![1, 1]]).unwrap();
        CssCode::new("gadget", h.clone(), h, CodeFamily::Generic).unwrap()
    }

    fn cfg_for(n: usize, p: f64) -> SymBreakConfig {
        let mut cfg = SymBreakConfig::default();
        cfg.bp.prior_llr = vec![prior_from_error_rate(p).unwrap(); n];
        cfg
    }

    fn state_with(llr: Vec<f64>) -> BpState {
        BpState {
            check_to_var: vec![],
            var_to_check: vec![],
            llr,
            iteration: 0,
        }
    }

    fn k_sequence(ds: &[usize], k_max: usize) -> (Vec<usize>, KStep, usize) {
        let mut c = KCounter::new(k_max);
        let mut ks = Vec::new();
        for (round, &d) in ds.iter().enumerate() {
            let step = c.observe(d);
            ks.push(c.k());
            if step != KStep::Continue {
                return (ks, step, round);
            }
        }
        (ks, KStep::Continue, ds.len())
    }

    #[test]
    fn k_counter_trajectories() {
        assert_eq!(k_sequence(&[5, 3, 3, 4, 2], 3).0, vec![0, 0, 1, 2, 1]);
        let (ks, step, round) = k_sequence(&[4, 4, 4, 4], 3);
        assert_eq!((ks, step, round), (vec![0, 1, 2, 3], KStep::Threshold, 3));
        assert_eq!(k_sequence(&[3, 2, 1, 0], 3).1, KStep::Matched);
    }

    #[test]
    fn zero_syndrome_needs_no_split() {
        let code = crate::codes::tests::bb72();
        let out = decode(&code, &BinVector::zeros(36), &cfg_for(72, 0.01), ErrorType::X).unwrap();
        assert!(out.converged && out.estimate.is_zero() && out.splits.is_empty());
        assert_eq!(out.stop_reason, StopReason::SyndromeMatched);
    }

    #[test]
    fn gadget_converges_after_one_split() {
        let code = gadget_code();
        let s = BinVector::from_u8(&[1]);
        for strategy in [SplitStrategy::BpGuided, SplitStrategy::SyndromeGuided] {
            let mut cfg = cfg_for(2, 0.05);
            cfg.split_strategy = Some(strategy);
            let out = decode(&code, &s, &cfg, ErrorType::X).unwrap();
            assert!(out.converged, "{strategy:?}");
            assert_eq!(out.splits.len(), 1);
            assert_eq!(out.estimate.weight(), 1);
            assert_eq!(code.hz.matvec(&out.estimate).unwrap(), s);
            assert_eq!(out.d_trajectory, vec![1, 0]);
        }
    }

    #[test]
    fn check_reliability_means() {
        let h = BinMatrix::from_row_support(8, vec![vec![0, 1, 2, 3, 4, 5], vec![], vec![6, 7]]).unwrap();
        let state = state_with(vec![-60.0, 50.0, -20.0, 10.0, 30.0, 40.0, 0.01, -0.01]);
        let r = check_reliability(&state, &h);
        assert_eq!(r[0], 35.0);
        assert_eq!(r[1], f64::INFINITY);
        assert!((r[2] - 0.01).abs() < 1e-12);
        let flat = check_reliability(&state_with(vec![2.5; 8]), &h);
        assert_eq!((flat[0], flat[2]), (2.5, 2.5));
    }

    #[test]
    fn target_is_argmin_with_fallback() {
        // Two X-checks; Z-check 0 overlaps both evenly.
        let hz = BinMatrix::from_row_support(4, vec![vec![0, 1, 2, 3]]).unwrap();
        let hx = BinMatrix::from_row_support(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let g = TannerGraph::from_parity(&hz, &BinVector::from_u8(&[1])).unwrap();
        let state = state_with(vec![0.1, 0.1, 5.0, 5.0]);
        let rel = check_reliability(&state, &hx);
        let t = select_split_target(&rel, &g, &hx, &state).unwrap();
        assert_eq!((t.gx_row, t.z_check), (0, 0));

        let mut g2 = g.clone();
        g2.split_check(0, &[0, 2], false).unwrap();
        assert_eq!(select_split_target(&rel, &g2, &hx, &state), None);
    }

    #[test]
    fn bp_guided_matches_figure_example() {
        // Check on q1..q6 (ids 0..5); the X-check overlaps q1..q4.
        let hz = BinMatrix::from_row_support(6, vec![vec![0, 1, 2, 3, 4, 5]]).unwrap();
        let g = TannerGraph::from_parity(&hz, &BinVector::from_u8(&[1])).unwrap();
        let state = state_with(vec![5.0, -60.0, 3.0, 4.0, 50.0, -20.0]);
        let plan = plan_split_bp_guided(&g, 0, &[0, 1, 2, 3], &state).unwrap();
        assert_eq!(plan.part1, vec![1, 4, 5]);
        assert!(!plan.s1);
        assert!(plan_split_bp_guided(&g, 0, &[0, 1, 2], &state).is_err());
    }

    #[test]
    fn bp_guided_overlap_two() {
        let hz = BinMatrix::from_row_support(2, vec![vec![0, 1]]).unwrap();
        let g = TannerGraph::from_parity(&hz, &BinVector::from_u8(&[1])).unwrap();
        let plan = plan_split_bp_guided(&g, 0, &[0, 1], &state_with(vec![0.5, -0.7])).unwrap();
        assert_eq!(plan.part1, vec![1]);
        assert!(plan.s1);
    }

    #[test]
    fn syndrome_guided_rules() {
        // Check 0 = {0..5}; check 1 touches qubit 0 with syndrome 1.
        let hz = BinMatrix::from_row_support(7, vec![vec![0, 1, 2, 3, 4, 5], vec![0, 6]]).unwrap();
        let g = TannerGraph::from_parity(&hz, &BinVector::from_u8(&[1, 1])).unwrap();
        let state = state_with(vec![1.0; 7]);
        let plan = plan_split_syndrome_guided(&g, 0, &[0, 1], &state).unwrap();
        assert_eq!(plan.method, SplitStrategy::SyndromeGuided);
        assert!(!plan.s1);
        assert!(!plan.part1.contains(&0));
        assert_eq!(sorted_intersection_count(&plan.part1, &[0, 1]) % 2, 1);

        // Both sides noisy: falls back to BP guidance.
        let hz = BinMatrix::from_row_support(4, vec![vec![0, 1], vec![0, 2], vec![1, 3]]).unwrap();
        let g = TannerGraph::from_parity(&hz, &BinVector::from_u8(&[1, 1, 1])).unwrap();
        let plan = plan_split_syndrome_guided(&g, 0, &[0, 1], &state_with(vec![1.0; 4])).unwrap();
        assert_eq!(plan.method, SplitStrategy::BpGuided);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        first_combination::<()>(4, 2, |c| {
            seen.push(c.to_vec());
            None
        });
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn girth_of_small_graphs() {
        assert_eq!(bipartite_girth(&[vec![0, 1], vec![0, 1]], 2), Some(4));
        assert_eq!(bipartite_girth(&[vec![0, 1], vec![1, 2], vec![2, 0]], 3), Some(6));
        assert_eq!(bipartite_girth(&[vec![0, 1], vec![1, 2]], 3), None);
    }

    #[test]
    fn bb72_layered_split_is_valid() {
        let code = crate::codes::tests::bb72();
        assert!(layered_split_valid(&code, ErrorType::X));
        assert!(layered_split_valid(&code, ErrorType::Z));
        let dec = SymBreakDecoder::new(&code, cfg_for(72, 0.01)).unwrap();
        assert_eq!(dec.strategy(ErrorType::X), SplitStrategy::BbLayered);
    }

    #[test]
    fn converged_outcomes_satisfy_original_syndrome() {
        let code = crate::codes::tests::bb72();
        let dec = SymBreakDecoder::new(&code, cfg_for(72, 0.02)).unwrap();
        for (i, t) in [ErrorType::X, ErrorType::Z].into_iter().cycle().take(40).enumerate() {
            let e = BinVector::new(72, vec![i % 72, (5 * i + 7) % 72, (11 * i + 3) % 72].into_iter().collect::<std::collections::BTreeSet<_>>().into_iter().collect()).unwrap();
            let h = code.checks_for(t);
            let s = h.matvec(&e).unwrap();
            let out = dec.decode(&s, t).unwrap();
            if out.converged {
                assert_eq!(h.matvec(&out.estimate).unwrap(), s);
            }
            for rec in &out.splits {
                let gx = code.stabilizers_for(t).row(rec.gx_row);
                assert_eq!(sorted_intersection_count(&rec.part1, gx) % 2, 1);
            }
            assert!(out.bp_iterations_total <= dec.config().bp.max_iters);
            let json = serde_json::to_string(&out).unwrap();
            let back: DecodeOutcome = serde_json::from_str(&json).unwrap();
            assert_eq!(back.splits, out.splits);
        }
    }
}
