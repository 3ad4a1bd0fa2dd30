//! Monte Carlo logical-error-rate and latency experiments.
//!
//! A shot samples a data error, decodes the X part through `hz` and the Z
//! part through `hx` (or only the types listed in the spec), and fails if
//! any decoded part fails. A part fails when the decoder did not converge,
//! when the residual `e ⊕ ê` still has a syndrome, or when the residual
//! anticommutes with a logical operator. `T_dcd` for a shot is the summed
//! wall time of its decoder calls.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::bp::{prior_from_error_rate, run_prevalidated, BpConfig, BpState};
use crate::codes::{CssCode, ErrorType};
use crate::error::{Error, Result};
use crate::gf2::BinVector;
use crate::noise::{sample_shot, shot_rng, NoiseModel};
use crate::oracle::MlOracle;
use crate::osd::{osd_postprocess, OsdConfig, DEFAULT_SWEEP_DEPTH};
use crate::registry::Registry;
use crate::symbreak::{SymBreakConfig, SymBreakDecoder};
use crate::tanner::TannerGraph;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959964;

/// Error rate used for priors when the configured rate is 0.
pub const PRIOR_EPSILON: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecoderSpec {
    Bp(BpConfig),
    BpOsd0(BpConfig),
    BpOsdCs(BpOsdCsConfig),
    #[serde(rename = "symbreak")]
    SymBreak(SymBreakConfig),
    /// Exhaustive maximum likelihood; `n ≤ 16` only.
    Ml,
    /// Returns the zero vector immediately. Measures harness overhead.
    Null,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpOsdCsConfig {
    #[serde(flatten)]
    pub bp: BpConfig,
    #[serde(default = "default_sweep_depth")]
    pub sweep_depth: usize,
}

fn default_sweep_depth() -> usize {
    DEFAULT_SWEEP_DEPTH
}

impl DecoderSpec {
    pub const NAMES: [&'static str; 6] = ["bp", "bp_osd0", "bp_osd_cs", "symbreak", "ml", "null"];

    /// Default configuration for a decoder name.
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "bp" => DecoderSpec::Bp(BpConfig::default()),
            "bp_osd0" => DecoderSpec::BpOsd0(BpConfig::default()),
            "bp_osd_cs" => DecoderSpec::BpOsdCs(BpOsdCsConfig {
                bp: BpConfig::default(),
                sweep_depth: DEFAULT_SWEEP_DEPTH,
            }),
            "symbreak" => DecoderSpec::SymBreak(SymBreakConfig::default()),
            "ml" => DecoderSpec::Ml,
            "null" => DecoderSpec::Null,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown decoder `{other}` (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    /// Accepts either a bare name or a tagged object.
    pub fn from_json(value: serde_json::Value) -> Result<Self> {
        match value {
            serde_json::Value::String(name) => Self::from_name(&name),
            other => Ok(serde_json::from_value(other)?),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DecoderSpec::Bp(_) => "bp",
            DecoderSpec::BpOsd0(_) => "bp_osd0",
            DecoderSpec::BpOsdCs(_) => "bp_osd_cs",
            DecoderSpec::SymBreak(_) => "symbreak",
            DecoderSpec::Ml => "ml",
            DecoderSpec::Null => "null",
        }
    }

    fn bp_mut(&mut self) -> Option<&mut BpConfig> {
        match self {
            DecoderSpec::Bp(bp) | DecoderSpec::BpOsd0(bp) => Some(bp),
            DecoderSpec::BpOsdCs(c) => Some(&mut c.bp),
            DecoderSpec::SymBreak(c) => Some(&mut c.bp),
            DecoderSpec::Ml | DecoderSpec::Null => None,
        }
    }
}

pub(crate) fn de_decoder<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<DecoderSpec, D::Error> {
    let value = serde_json::Value::deserialize(d)?;
    DecoderSpec::from_json(value).map_err(serde::de::Error::custom)
}

fn default_error_types() -> Vec<ErrorType> {
    vec![ErrorType::X, ErrorType::Z]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub code: String,
    pub noise: NoiseModel,
    #[serde(deserialize_with = "de_decoder")]
    pub decoder: DecoderSpec,
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    /// Run on a single worker so per-shot times are not disturbed by
    /// sibling threads.
    #[serde(default)]
    pub timing: bool,
    #[serde(default = "default_error_types")]
    pub error_types: Vec<ErrorType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Keep per-shot records in the result.
    #[serde(default)]
    pub record_shots: bool,
}

impl ExperimentSpec {
    pub fn new(code: impl Into<String>, noise: NoiseModel, decoder: DecoderSpec, shots: u64, seed: u64) -> Self {
        ExperimentSpec {
            code: code.into(),
            noise,
            decoder,
            shots,
            seed,
            timing: false,
            error_types: default_error_types(),
            threads: None,
            record_shots: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        if self.error_types.is_empty() {
            return Err(Error::InvalidArgument("error_types must not be empty".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("threads must be at least 1".into()));
        }
        self.noise.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub shot: u64,
    pub failed: bool,
    pub time_us: f64,
    pub stop_reasons: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LerResult {
    pub code: String,
    pub decoder: String,
    pub p: f64,
    pub shots: u64,
    pub failures: u64,
    pub ler: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_time_us: f64,
    pub p99_time_us: f64,
    /// Decoder calls per stop reason (one call per error type per shot).
    #[serde(default)]
    pub stop_reasons: BTreeMap<String, u64>,
    /// Converged decoder outputs that do not reproduce their syndrome. Must
    /// be zero for a correct decoder.
    #[serde(default)]
    pub syndrome_violations: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shot_records: Vec<ShotRecord>,
}

impl LerResult {
    pub fn ci_half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(failures: u64, shots: u64) -> (f64, f64) {
    if shots == 0 {
        return (0.0, 1.0);
    }
    let n = shots as f64;
    let phat = failures as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if failures == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if failures == shots { 1.0 } else { (center + half).min(1.0) };
    (low, high)
}

/// Failure test for one decoded part.
pub fn is_logical_failure(code: &CssCode, e: &BinVector, estimate: &BinVector, t: ErrorType, converged: bool) -> bool {
    if !converged {
        return true;
    }
    let Ok(r) = e.xor(estimate) else {
        return true;
    };
    if !code.checks_for(t).matvec(&r).map(|s| s.is_zero()).unwrap_or(false) {
        return true;
    }
    code.detecting_logicals(t).iter().any(|l| l.dot(&r))
}

/// Result of one decoder call.
#[derive(Clone, Debug)]
pub struct Decoded {
    pub estimate: BinVector,
    pub converged: bool,
    pub stop_reason: &'static str,
}

/// A decoder ready for repeated calls on one code and error type.
pub enum PreparedDecoder<'a> {
    Bp {
        code: &'a CssCode,
        t: ErrorType,
        bp: BpConfig,
        osd: Option<OsdConfig>,
        /// Tanner graph of the check matrix with a zero syndrome.
        base: TannerGraph,
    },
    SymBreak { decoder: SymBreakDecoder<'a>, t: ErrorType },
    Ml(MlOracle),
    Null { n: usize },
}

impl<'a> PreparedDecoder<'a> {
    pub fn new(spec: &DecoderSpec, code: &'a CssCode, noise: &NoiseModel, t: ErrorType) -> Result<Self> {
        let p = noise.marginal(t);
        let prior = vec![prior_from_error_rate(p.clamp(PRIOR_EPSILON, 1.0 - PRIOR_EPSILON))?; code.n];
        let with_prior = |bp: &BpConfig| -> Result<BpConfig> {
            let bp = BpConfig {
                prior_llr: prior.clone(),
                ..bp.clone()
            };
            bp.validate(code.n)?;
            Ok(bp)
        };
        let base = || {
            let h = code.checks_for(t);
            TannerGraph::from_parity(h, &BinVector::zeros(h.rows()))
        };
        Ok(match spec {
            DecoderSpec::Bp(bp) => PreparedDecoder::Bp { code, t, bp: with_prior(bp)?, osd: None, base: base()? },
            DecoderSpec::BpOsd0(bp) => PreparedDecoder::Bp {
                code,
                t,
                bp: with_prior(bp)?,
                osd: Some(OsdConfig::Osd0),
                base: base()?,
            },
            DecoderSpec::BpOsdCs(c) => {
                let osd = OsdConfig::OsdCs { sweep_depth: c.sweep_depth };
                osd.validate()?;
                PreparedDecoder::Bp { code, t, bp: with_prior(&c.bp)?, osd: Some(osd), base: base()? }
            }
            DecoderSpec::SymBreak(cfg) => {
                let cfg = SymBreakConfig {
                    bp: with_prior(&cfg.bp)?,
                    ..cfg.clone()
                };
                PreparedDecoder::SymBreak {
                    decoder: SymBreakDecoder::new(code, cfg)?,
                    t,
                }
            }
            DecoderSpec::Ml => PreparedDecoder::Ml(MlOracle::new(code, t, p.min(0.5))?),
            DecoderSpec::Null => PreparedDecoder::Null { n: code.n },
        })
    }

    pub fn decode(&self, syndrome: &BinVector) -> Result<Decoded> {
        match self {
            PreparedDecoder::Bp { code, t, bp, osd, base } => {
                let h = code.checks_for(*t);
                let g = base.with_syndrome(syndrome)?;
                let out = run_prevalidated(&g, bp, BpState::new(&g, &bp.prior_llr), None);
                if out.converged {
                    return Ok(Decoded {
                        estimate: out.estimate,
                        converged: true,
                        stop_reason: "syndrome_matched",
                    });
                }
                match osd {
                    Some(osd) => Ok(Decoded {
                        estimate: osd_postprocess(h, syndrome, &out.state.llr, osd)?,
                        converged: true,
                        stop_reason: "osd",
                    }),
                    None => Ok(Decoded {
                        estimate: out.estimate,
                        converged: false,
                        stop_reason: "iteration_limit",
                    }),
                }
            }
            PreparedDecoder::SymBreak { decoder, t } => {
                let out = decoder.decode_lean(syndrome, *t)?;
                Ok(Decoded {
                    estimate: out.estimate,
                    converged: out.converged,
                    stop_reason: if out.osd_rescued { "osd" } else { out.stop_reason.as_str() },
                })
            }
            PreparedDecoder::Ml(oracle) => Ok(Decoded {
                estimate: oracle.decode(syndrome)?,
                converged: true,
                stop_reason: "ml",
            }),
            PreparedDecoder::Null { n } => Ok(Decoded {
                estimate: BinVector::zeros(*n),
                converged: true,
                stop_reason: "null",
            }),
        }
    }
}

struct ShotOutcome {
    failed: bool,
    nanos: u64,
    stops: Vec<&'static str>,
    violations: u64,
}

pub fn run_experiment(spec: &ExperimentSpec, registry: &Registry) -> Result<LerResult> {
    let code = registry.get(&spec.code)?;
    run_experiment_on(&code, spec)
}

/// [`run_experiment`] on an already constructed code.
pub fn run_experiment_on(code: &CssCode, spec: &ExperimentSpec) -> Result<LerResult> {
    spec.validate()?;
    let decoders: Vec<(ErrorType, PreparedDecoder)> = spec
        .error_types
        .iter()
        .map(|&t| Ok((t, PreparedDecoder::new(&spec.decoder, code, &spec.noise, t)?)))
        .collect::<Result<_>>()?;

    let shot = |i: u64| -> Result<ShotOutcome> {
        let mut rng = shot_rng(spec.seed, i);
        let sample = sample_shot(&spec.noise, code, &mut rng);
        let mut out = ShotOutcome {
            failed: false,
            nanos: 0,
            stops: Vec::with_capacity(decoders.len()),
            violations: 0,
        };
        for (t, dec) in &decoders {
            let s = sample.syndrome(code, *t)?;
            let start = Instant::now();
            let d = dec.decode(&s)?;
            out.nanos += start.elapsed().as_nanos() as u64;
            if d.converged && code.checks_for(*t).matvec(&d.estimate)? != s {
                out.violations += 1;
            }
            out.failed |= is_logical_failure(code, sample.error(*t), &d.estimate, *t, d.converged);
            out.stops.push(d.stop_reason);
        }
        Ok(out)
    };

    let threads = if spec.timing { Some(1) } else { spec.threads };
    let run_all = || -> Result<Vec<ShotOutcome>> { (0..spec.shots).into_par_iter().map(shot).collect() };
    let outcomes = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(run_all)?,
        None => run_all()?,
    };
    Ok(summarize(code, spec, &outcomes))
}

fn summarize(code: &CssCode, spec: &ExperimentSpec, outcomes: &[ShotOutcome]) -> LerResult {
    let shots = outcomes.len() as u64;
    let failures = outcomes.iter().filter(|o| o.failed).count() as u64;
    let (ci_low, ci_high) = wilson_interval(failures, shots);
    let mut times: Vec<f64> = outcomes.iter().map(|o| o.nanos as f64 / 1e3).collect();
    let mean_time_us = times.iter().sum::<f64>() / shots as f64;
    times.sort_by(f64::total_cmp);
    let p99_index = ((0.99 * shots as f64).ceil() as usize).clamp(1, times.len()) - 1;
    let mut stop_reasons = BTreeMap::new();
    for o in outcomes {
        for s in &o.stops {
            *stop_reasons.entry(s.to_string()).or_insert(0) += 1;
        }
    }
    let shot_records = if spec.record_shots {
        outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| ShotRecord {
                shot: i as u64,
                failed: o.failed,
                time_us: o.nanos as f64 / 1e3,
                stop_reasons: o.stops.iter().map(|s| s.to_string()).collect(),
            })
            .collect()
    } else {
        Vec::new()
    };
    LerResult {
        code: code.label.clone(),
        decoder: spec.decoder.name().to_string(),
        p: spec.noise.nominal_p(),
        shots,
        failures,
        ler: failures as f64 / shots as f64,
        ci_low,
        ci_high,
        mean_time_us,
        p99_time_us: times[p99_index],
        stop_reasons,
        syndrome_violations: outcomes.iter().map(|o| o.violations).sum(),
        shot_records,
    }
}

/// Latency comparison on a single thread. Every decoder sees the same
/// shots; the order in which decoders run rotates from shot to shot so that
/// cache warmth and clock drift affect all of them alike. The first
/// `warmup` shots are decoded but not recorded.
pub fn bench_decoders(
    code: &CssCode,
    noise: &NoiseModel,
    decoders: &[DecoderSpec],
    error_types: &[ErrorType],
    shots: u64,
    warmup: u64,
    seed: u64,
) -> Result<Vec<LerResult>> {
    noise.validate()?;
    if decoders.is_empty() || shots == 0 {
        return Err(Error::InvalidArgument("bench needs at least one decoder and one shot".into()));
    }
    let prepared: Vec<Vec<(ErrorType, PreparedDecoder)>> = decoders
        .iter()
        .map(|spec| {
            error_types
                .iter()
                .map(|&t| Ok((t, PreparedDecoder::new(spec, code, noise, t)?)))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let k = decoders.len();
    let mut outcomes: Vec<Vec<ShotOutcome>> = (0..k).map(|_| Vec::with_capacity(shots as usize)).collect();
    for i in 0..warmup + shots {
        let sample = sample_shot(noise, code, &mut shot_rng(seed, i));
        let syndromes: Vec<BinVector> = error_types
            .iter()
            .map(|&t| sample.syndrome(code, t))
            .collect::<Result<_>>()?;
        for j in 0..k {
            let d = (j + i as usize) % k;
            let mut out = ShotOutcome {
                failed: false,
                nanos: 0,
                stops: Vec::with_capacity(error_types.len()),
                violations: 0,
            };
            for ((t, dec), s) in prepared[d].iter().zip(&syndromes) {
                let start = Instant::now();
                let r = dec.decode(s)?;
                out.nanos += start.elapsed().as_nanos() as u64;
                if r.converged && code.checks_for(*t).matvec(&r.estimate)? != *s {
                    out.violations += 1;
                }
                out.failed |= is_logical_failure(code, sample.error(*t), &r.estimate, *t, r.converged);
                out.stops.push(r.stop_reason);
            }
            if i >= warmup {
                outcomes[d].push(out);
            }
        }
    }
    Ok(decoders
        .iter()
        .zip(&outcomes)
        .map(|(spec, o)| {
            let mut exp = ExperimentSpec::new(code.label.clone(), *noise, spec.clone(), shots, seed);
            exp.error_types = error_types.to_vec();
            summarize(code, &exp, o)
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    P,
    MaxIters,
    MaxSplits,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// `spec` with one sweep coordinate replaced.
pub fn apply_axis(spec: &ExperimentSpec, axis: SweepAxis, value: f64) -> Result<ExperimentSpec> {
    let mut out = spec.clone();
    let as_count = |v: f64| -> Result<usize> {
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::InvalidArgument(format!("{axis:?} value {v} is not a count")));
        }
        Ok(v as usize)
    };
    match axis {
        SweepAxis::P => out.noise = spec.noise.with_p(value),
        SweepAxis::MaxIters => {
            let name = out.decoder.name();
            let bp = out
                .decoder
                .bp_mut()
                .ok_or_else(|| Error::InvalidArgument(format!("decoder `{name}` has no iteration limit")))?;
            bp.max_iters = as_count(value)?;
        }
        SweepAxis::MaxSplits => match &mut out.decoder {
            DecoderSpec::SymBreak(cfg) => cfg.max_splits = as_count(value)?,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "max_splits applies to symbreak only, not `{}`",
                    other.name()
                )))
            }
        },
    }
    Ok(out)
}

/// One experiment per value, all with the template's seed.
pub fn sweep(template: &ExperimentSpec, axis: SweepAxis, values: &[f64], registry: &Registry) -> Result<Vec<LerResult>> {
    let specs: Vec<ExperimentSpec> = values
        .iter()
        .map(|&v| apply_axis(template, axis, v))
        .collect::<Result<_>>()?;
    let code = registry.get(&template.code)?;
    specs.iter().map(|s| run_experiment_on(&code, s)).collect()
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    code: String,
    decoder: String,
    p: f64,
    shots: u64,
    failures: u64,
    ler: f64,
    ci_low: f64,
    ci_high: f64,
    mean_time_us: f64,
    p99_time_us: f64,
}

pub const CSV_HEADER: &str = "code,decoder,p,shots,failures,ler,ci_low,ci_high,mean_time_us,p99_time_us";

pub fn write_csv(results: &[LerResult], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        w.serialize(CsvRow {
            code: r.code.clone(),
            decoder: r.decoder.clone(),
            p: r.p,
            shots: r.shots,
            failures: r.failures,
            ler: r.ler,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
            mean_time_us: r.mean_time_us,
            p99_time_us: r.p99_time_us,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_csv`]. Columns outside the CSV (stop
/// reasons, shot records) come back empty.
pub fn read_csv(input: impl Read) -> Result<Vec<LerResult>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize::<CsvRow>()
        .map(|row| {
            let row = row?;
            Ok(LerResult {
                code: row.code,
                decoder: row.decoder,
                p: row.p,
                shots: row.shots,
                failures: row.failures,
                ler: row.ler,
                ci_low: row.ci_low,
                ci_high: row.ci_high,
                mean_time_us: row.mean_time_us,
                p99_time_us: row.p99_time_us,
                stop_reasons: BTreeMap::new(),
                syndrome_violations: 0,
                shot_records: Vec::new(),
            })
        })
        .collect()
}
