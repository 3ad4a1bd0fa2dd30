//! Belief propagation on a (possibly split) Tanner graph.
//!
//! Messages live in per-edge buffers indexed by the graph's stable edge ids.
//! LLRs follow the convention `L(q) = log((1 − p_q) / p_q)`: negative means
//! "error more likely", and `L(q) = 0` decodes to "no error".

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BinVector;
use crate::tanner::TannerGraph;

pub const DEFAULT_LLR_CLIP: f64 = 100.0;
pub const DEFAULT_MIN_SUM_SCALE: f64 = 0.625;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    #[default]
    Flooding,
    /// Checks updated one at a time, each seeing the LLRs already refreshed
    /// by earlier checks in the same iteration.
    Serial,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Variant {
    ProductSum,
    MinSum { scale: f64 },
}

impl Default for Variant {
    fn default() -> Self {
        Variant::ProductSum
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BpConfig {
    pub max_iters: usize,
    pub schedule: Schedule,
    pub variant: Variant,
    pub llr_clip: f64,
    /// Channel LLR per variable. Usually filled in from a noise model rather
    /// than configured by hand.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub prior_llr: Vec<f64>,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig {
            max_iters: 100,
            schedule: Schedule::Flooding,
            variant: Variant::ProductSum,
            llr_clip: DEFAULT_LLR_CLIP,
            prior_llr: Vec::new(),
        }
    }
}

impl BpConfig {
    pub fn with_uniform_prior(mut self, n: usize, p: f64) -> Result<Self> {
        self.prior_llr = vec![prior_from_error_rate(p)?; n];
        Ok(self)
    }

    pub fn validate(&self, n_vars: usize) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("bp max_iters must be at least 1".into()));
        }
        if !(self.llr_clip > 0.0) {
            return Err(Error::InvalidArgument("llr_clip must be positive".into()));
        }
        if let Variant::MinSum { scale } = self.variant {
            if !(scale > 0.0 && scale <= 1.0) {
                return Err(Error::InvalidArgument(format!("min-sum scale {scale} outside (0, 1]")));
            }
        }
        if self.prior_llr.len() != n_vars {
            return Err(Error::DimensionMismatch {
                expected: n_vars,
                got: self.prior_llr.len(),
                context: "prior_llr length vs variable count",
            });
        }
        if self.prior_llr.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidArgument("prior LLRs must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpState {
    pub check_to_var: Vec<f64>,
    pub var_to_check: Vec<f64>,
    /// Posterior LLR `L(q)` per variable.
    pub llr: Vec<f64>,
    pub iteration: usize,
}

impl BpState {
    /// Fresh state: variable-to-check messages equal the priors.
    pub fn new(g: &TannerGraph, prior_llr: &[f64]) -> Self {
        BpState {
            check_to_var: vec![0.0; g.n_edges()],
            var_to_check: g.edges().iter().map(|&(_, v)| prior_llr[v]).collect(),
            llr: prior_llr.to_vec(),
            iteration: 0,
        }
    }

    /// Hard decision `L(q) < 0`.
    pub fn hard_decision(&self) -> Vec<bool> {
        self.llr.iter().map(|&l| l < 0.0).collect()
    }
}

#[derive(Clone, Debug)]
pub struct BpOutput {
    pub state: BpState,
    pub estimate: BinVector,
    pub converged: bool,
    /// Iterations executed by this call.
    pub iterations: usize,
}

pub fn prior_from_error_rate(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("error rate {p} outside (0, 1)")));
    }
    Ok(((1.0 - p) / p).ln())
}

pub fn error_probabilities(state: &BpState) -> Vec<f64> {
    state.llr.iter().map(|&l| 1.0 / (1.0 + l.exp())).collect()
}

pub fn reliability(state: &BpState, q: usize) -> f64 {
    state.llr[q].abs()
}

/// Runs up to `cfg.max_iters` iterations, stopping as soon as the hard
/// decision satisfies every check of `g`. A supplied `state` is continued
/// (warm start); otherwise messages start from the priors.
pub fn run_bp(g: &TannerGraph, cfg: &BpConfig, state: Option<BpState>) -> Result<BpOutput> {
    run_bp_traced(g, cfg, state, None)
}

/// [`run_bp`] that also records the LLR vector after every iteration.
pub fn run_bp_traced(
    g: &TannerGraph,
    cfg: &BpConfig,
    state: Option<BpState>,
    trace: Option<&mut Vec<Vec<f64>>>,
) -> Result<BpOutput> {
    cfg.validate(g.n_vars())?;
    let state = match state {
        Some(s) if s.check_to_var.len() == g.n_edges() && s.llr.len() == g.n_vars() => s,
        Some(_) => {
            return Err(Error::InvalidArgument(
                "warm-start state does not match the graph".into(),
            ))
        }
        None => BpState::new(g, &cfg.prior_llr),
    };
    Ok(run_prevalidated(g, cfg, state, trace))
}

/// BP from `state` with a configuration already checked against `g`.
pub(crate) fn run_prevalidated(
    g: &TannerGraph,
    cfg: &BpConfig,
    mut state: BpState,
    trace: Option<&mut Vec<Vec<f64>>>,
) -> BpOutput {
    let mut engine = Engine::new(g);
    let (iterations, converged) = engine.iterate(g, cfg, &mut state, cfg.max_iters, true, trace);
    let estimate = BinVector::from_bits(&engine.hard);
    BpOutput {
        state,
        estimate,
        converged,
        iterations,
    }
}

/// LLR trace as CSV with columns `iteration,var,llr`.
pub fn llr_trace_csv(trace: &[Vec<f64>]) -> String {
    let mut out = String::from("iteration,var,llr\n");
    for (it, llrs) in trace.iter().enumerate() {
        for (v, l) in llrs.iter().enumerate() {
            let _ = writeln!(out, "{},{v},{l}", it + 1);
        }
    }
    out
}

/// Reusable scratch for repeated BP calls on one graph.
pub(crate) struct Engine {
    pub hard: Vec<bool>,
    total: Vec<f64>,
    incoming: Vec<f64>,
    outgoing: Vec<f64>,
    scratch: Vec<f64>,
}

impl Engine {
    pub fn new(g: &TannerGraph) -> Self {
        Engine {
            hard: vec![false; g.n_vars()],
            total: vec![0.0; g.n_vars()],
            incoming: Vec::new(),
            outgoing: Vec::new(),
            scratch: Vec::new(),
        }
    }

    /// Runs at most `iters` iterations. Returns iterations done and whether
    /// the final hard decision matches the syndrome. With `stop_early`
    /// unset every iteration runs regardless of convergence.
    pub fn iterate(
        &mut self,
        g: &TannerGraph,
        cfg: &BpConfig,
        state: &mut BpState,
        iters: usize,
        stop_early: bool,
        mut trace: Option<&mut Vec<Vec<f64>>>,
    ) -> (usize, bool) {
        self.hard.resize(g.n_vars(), false);
        self.total.resize(g.n_vars(), 0.0);
        let clip = cfg.llr_clip;
        let mut converged = false;
        let mut done = 0;
        while done < iters {
            match cfg.schedule {
                Schedule::Flooding => self.flooding_step(g, cfg, state),
                Schedule::Serial => self.serial_step(g, cfg, state),
            }
            for (v, t) in self.total.iter().enumerate() {
                state.llr[v] = t.clamp(-clip, clip);
                self.hard[v] = state.llr[v] < 0.0;
            }
            state.iteration += 1;
            done += 1;
            if let Some(t) = trace.as_deref_mut() {
                t.push(state.llr.clone());
            }
            converged = g.mismatch_count(&self.hard) == 0;
            if converged && stop_early {
                break;
            }
        }
        if done == 0 {
            for (v, &l) in state.llr.iter().enumerate() {
                self.hard[v] = l < 0.0;
            }
            converged = g.mismatch_count(&self.hard) == 0;
        }
        (done, converged)
    }

    fn flooding_step(&mut self, g: &TannerGraph, cfg: &BpConfig, state: &mut BpState) {
        let clip = cfg.llr_clip;
        for c in g.checks() {
            let edges = g.check_edges(c.id);
            self.incoming.clear();
            self.incoming.extend(edges.iter().map(|&e| state.var_to_check[e]));
            check_update(cfg.variant, clip, c.syndrome, &self.incoming, &mut self.outgoing, &mut self.scratch);
            for (&e, &m) in edges.iter().zip(&self.outgoing) {
                state.check_to_var[e] = m;
            }
        }
        for v in 0..g.n_vars() {
            let adj = g.var_adj(v);
            let total = cfg.prior_llr[v] + adj.iter().map(|&(_, e)| state.check_to_var[e]).sum::<f64>();
            self.total[v] = total;
            for &(_, e) in adj {
                state.var_to_check[e] = (total - state.check_to_var[e]).clamp(-clip, clip);
            }
        }
    }

    fn serial_step(&mut self, g: &TannerGraph, cfg: &BpConfig, state: &mut BpState) {
        let clip = cfg.llr_clip;
        for v in 0..g.n_vars() {
            self.total[v] = cfg.prior_llr[v] + g.var_adj(v).iter().map(|&(_, e)| state.check_to_var[e]).sum::<f64>();
        }
        let edges = g.edges();
        for c in g.checks() {
            self.incoming.clear();
            for &e in g.check_edges(c.id) {
                let v = edges[e].1;
                let m = (self.total[v] - state.check_to_var[e]).clamp(-clip, clip);
                state.var_to_check[e] = m;
                self.incoming.push(m);
            }
            check_update(cfg.variant, clip, c.syndrome, &self.incoming, &mut self.outgoing, &mut self.scratch);
            for (&e, &m) in g.check_edges(c.id).iter().zip(&self.outgoing) {
                let v = edges[e].1;
                self.total[v] += m - state.check_to_var[e];
                state.check_to_var[e] = m;
            }
        }
    }
}

/// Check-node rule. `out[i]` is the message to the i-th neighbor computed
/// from all other incoming messages, sign-flipped when the syndrome is 1.
fn check_update(
    variant: Variant,
    clip: f64,
    syndrome: bool,
    incoming: &[f64],
    out: &mut Vec<f64>,
    scratch: &mut Vec<f64>,
) {
    let deg = incoming.len();
    out.clear();
    out.resize(deg, 0.0);
    let flip = if syndrome { -1.0 } else { 1.0 };
    match variant {
        Variant::ProductSum => {
            // Leave-one-out products via prefix/suffix sweeps so that a zero
            // factor does not need a division.
            scratch.clear();
            scratch.extend(incoming.iter().map(|&m| (m * 0.5).tanh()));
            let mut prefix = 1.0;
            for i in 0..deg {
                out[i] = prefix;
                prefix *= scratch[i];
            }
            let mut suffix = 1.0;
            for i in (0..deg).rev() {
                let prod = out[i] * suffix;
                suffix *= scratch[i];
                out[i] = (flip * 2.0 * prod.atanh()).clamp(-clip, clip);
            }
        }
        Variant::MinSum { scale } => {
            let mut sign = flip;
            let (mut min1, mut min2, mut arg) = (f64::INFINITY, f64::INFINITY, usize::MAX);
            for (i, &m) in incoming.iter().enumerate() {
                if m < 0.0 {
                    sign = -sign;
                }
                let a = m.abs();
                if a < min1 {
                    min2 = min1;
                    min1 = a;
                    arg = i;
                } else if a < min2 {
                    min2 = a;
                }
            }
            for (i, &m) in incoming.iter().enumerate() {
                let mag = if i == arg { min2 } else { min1 };
                let s = if m < 0.0 { -sign } else { sign };
                out[i] = (s * scale * mag).clamp(-clip, clip);
            }
        }
    }
}
