use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use symbreak_core::codes::{CssCode, ErrorType};
use symbreak_core::gf2::BinVector;
use symbreak_core::harness::{
    bench_decoders, run_experiment_on, sweep, write_csv, DecoderSpec, ExperimentSpec, LerResult, PreparedDecoder,
    SweepSpec,
};
use symbreak_core::noise::{sample_shot, shot_rng, NoiseModel};
use symbreak_core::registry::{Recipe, Registry};
use symbreak_core::symbreak::{SymBreakConfig, SymBreakDecoder};
use symbreak_core::Error;

#[derive(Parser)]
#[command(name = "symbreak", version, about = "Quantum LDPC decoding with syndrome-split BP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the code registry.
    Codes {
        #[command(subcommand)]
        action: CodesAction,
    },
    /// Decode one syndrome read from a file.
    Decode(DecodeArgs),
    /// Estimate the logical error rate of one configuration.
    Ler(RunArgs),
    /// Run a configuration once per value of a sweep axis.
    Sweep(RunArgs),
    /// Compare decoder latency on shared shots.
    Bench(RunArgs),
    /// Decode one sampled shot with SymBreak and dump its split trace.
    Trace(TraceArgs),
}

#[derive(Subcommand)]
enum CodesAction {
    List,
    Check { label: String },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<u64>,
    /// Decoder name; for `bench`, a comma-separated list.
    #[arg(long)]
    decoder: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    /// CSV output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON with full results, including per-shot records.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    code: String,
    /// One ASCII 0/1 per check, or a JSON array of bits.
    #[arg(long)]
    syndrome: PathBuf,
    #[arg(long, default_value = "x")]
    error_type: String,
    #[arg(long, default_value = "symbreak")]
    decoder: String,
    /// Physical error rate used for the priors (depolarizing model).
    #[arg(long, default_value_t = 0.003)]
    p: f64,
    /// JSON decoder configuration; overrides --decoder.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    code: String,
    #[arg(long, default_value_t = 0.003)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shot index within the seed's stream.
    #[arg(long, default_value_t = 0)]
    shot: u64,
    #[arg(long, default_value = "x")]
    error_type: String,
    /// JSON SymBreak configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

/// Experiment configuration file: an experiment spec plus optional sweep and
/// decoder list (for `bench`).
#[derive(Deserialize)]
struct ConfigFile {
    #[serde(flatten)]
    spec: ExperimentSpec,
    #[serde(default)]
    sweep: Option<SweepSpec>,
    #[serde(default)]
    decoders: Option<Vec<serde_json::Value>>,
    #[serde(default = "default_warmup")]
    warmup: u64,
}

fn default_warmup() -> u64 {
    200
}

enum Failure {
    Usage(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) => Failure::Invariant(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant violation: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    let registry = Registry::load_default()?;
    match cli.command {
        Command::Codes { action: CodesAction::List } => codes_list(&registry),
        Command::Codes {
            action: CodesAction::Check { label },
        } => codes_check(&registry, &label),
        Command::Decode(args) => decode(&registry, args),
        Command::Ler(args) => ler(&registry, args),
        Command::Sweep(args) => run_sweep(&registry, args),
        Command::Bench(args) => bench(&registry, args),
        Command::Trace(args) => trace(&registry, args),
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> CliResult {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn parse_error_type(s: &str) -> CliResult<ErrorType> {
    Ok(s.parse::<ErrorType>()?)
}

fn codes_list(registry: &Registry) -> CliResult {
    for label in registry.labels() {
        let entry = registry.entry(label)?;
        let family = match entry.recipe {
            Recipe::Bb { .. } => "bb",
            Recipe::Gb { .. } => "gb",
            Recipe::Hp { .. } => "hp",
            Recipe::Css { .. } => "css",
        };
        let show = |v: Option<usize>| v.map_or_else(|| "?".to_string(), |x| x.to_string());
        let mut line = format!(
            "{label}\tfamily={family} n={} k={} d={}",
            show(entry.n),
            show(entry.k),
            show(entry.claimed_distance)
        );
        if let Some(note) = &entry.note {
            line.push_str(&format!("\t# {note}"));
        }
        println!("{line}");
    }
    Ok(())
}

fn codes_check(registry: &Registry, label: &str) -> CliResult {
    let code = registry.get(label)?;
    let report = code.check()?;
    println!("{report}");
    Ok(())
}

fn parse_syndrome(text: &str, expected: usize) -> CliResult<BinVector> {
    let trimmed = text.trim();
    let bits: Vec<u8> = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Json {
            Bits(Vec<u8>),
            Wrapped { syndrome: Vec<u8> },
        }
        match serde_json::from_str::<Json>(trimmed).map_err(|e| Failure::Usage(format!("syndrome JSON: {e}")))? {
            Json::Bits(b) | Json::Wrapped { syndrome: b } => b,
        }
    } else {
        trimmed
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Failure::Usage(format!("syndrome file: unexpected character `{other}`"))),
            })
            .collect::<CliResult<_>>()?
    };
    if bits.iter().any(|&b| b > 1) {
        return Err(Failure::Usage("syndrome entries must be 0 or 1".into()));
    }
    if bits.len() != expected {
        return Err(Failure::Usage(format!(
            "syndrome has {} bits, the code has {expected} checks of that type",
            bits.len()
        )));
    }
    Ok(BinVector::from_u8(&bits))
}

fn bit_string(v: &BinVector) -> String {
    v.to_u8().iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
}

fn decode(registry: &Registry, args: DecodeArgs) -> CliResult {
    let code = registry.get(&args.code)?;
    let t = parse_error_type(&args.error_type)?;
    let spec = match &args.config {
        Some(path) => DecoderSpec::from_json(read_json(path)?)?,
        None => DecoderSpec::from_name(&args.decoder)?,
    };
    let syndrome = parse_syndrome(&read_text(&args.syndrome)?, code.checks_for(t).rows())?;
    let noise = NoiseModel::Depolarizing { p: args.p };
    noise.validate()?;
    let decoder = PreparedDecoder::new(&spec, &code, &noise, t)?;
    let out = decoder.decode(&syndrome)?;
    println!("estimate={}", bit_string(&out.estimate));
    println!("weight={}", out.estimate.weight());
    println!("converged={}", out.converged);
    println!("stop_reason={}", out.stop_reason);
    Ok(())
}

fn load_config(registry: &Registry, args: &RunArgs) -> CliResult<(ConfigFile, CssCode)> {
    let mut cfg: ConfigFile = read_json(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.spec.seed = seed;
    }
    if let Some(shots) = args.shots {
        cfg.spec.shots = shots;
    }
    if let Some(threads) = args.threads {
        cfg.spec.threads = Some(threads);
    }
    let code = registry.get(&cfg.spec.code)?;
    Ok((cfg, code))
}

fn emit(results: &[LerResult], args: &RunArgs) -> CliResult {
    let mut csv = Vec::new();
    write_csv(results, &mut csv)?;
    write_output(args.out.as_deref(), &csv)?;
    if let Some(path) = &args.trace_out {
        let json = serde_json::to_vec_pretty(results).map_err(|e| Failure::Usage(e.to_string()))?;
        write_output(Some(path), &json)?;
    }
    Ok(())
}

fn ler(registry: &Registry, args: RunArgs) -> CliResult {
    let (mut cfg, code) = load_config(registry, &args)?;
    if let Some(name) = &args.decoder {
        cfg.spec.decoder = DecoderSpec::from_name(name)?;
    }
    cfg.spec.record_shots = args.trace_out.is_some();
    let result = run_experiment_on(&code, &cfg.spec)?;
    emit(&[result], &args)
}

fn run_sweep(registry: &Registry, args: RunArgs) -> CliResult {
    let (mut cfg, _) = load_config(registry, &args)?;
    if let Some(name) = &args.decoder {
        cfg.spec.decoder = DecoderSpec::from_name(name)?;
    }
    let axis = cfg
        .sweep
        .ok_or_else(|| Failure::Usage("config has no `sweep` section".into()))?;
    cfg.spec.record_shots = args.trace_out.is_some();
    let results = sweep(&cfg.spec, axis.axis, &axis.values, registry)?;
    emit(&results, &args)
}

fn bench(registry: &Registry, args: RunArgs) -> CliResult {
    let (cfg, code) = load_config(registry, &args)?;
    let decoders: Vec<DecoderSpec> = match (&args.decoder, cfg.decoders) {
        (Some(list), _) => list
            .split(',')
            .map(|s| DecoderSpec::from_name(s.trim()))
            .collect::<Result<_, _>>()?,
        (None, Some(values)) => values
            .into_iter()
            .map(DecoderSpec::from_json)
            .collect::<Result<_, _>>()?,
        (None, None) => vec![cfg.spec.decoder.clone()],
    };
    let results = bench_decoders(
        &code,
        &cfg.spec.noise,
        &decoders,
        &cfg.spec.error_types,
        cfg.spec.shots,
        cfg.warmup,
        cfg.spec.seed,
    )?;
    for r in &results {
        eprintln!(
            "{:<10} mean {:>9.2} us  p99 {:>9.2} us  ler {:.3e}",
            r.decoder, r.mean_time_us, r.p99_time_us, r.ler
        );
    }
    emit(&results, &args)
}

fn trace(registry: &Registry, args: TraceArgs) -> CliResult {
    let code = registry.get(&args.code)?;
    let t = parse_error_type(&args.error_type)?;
    let mut cfg: SymBreakConfig = match &args.config {
        Some(path) => read_json(path)?,
        None => SymBreakConfig::default(),
    };
    let noise = NoiseModel::Depolarizing { p: args.p };
    noise.validate()?;
    cfg.bp.prior_llr = vec![symbreak_core::bp::prior_from_error_rate(noise.marginal(t).max(1e-9))?; code.n];
    let sample = sample_shot(&noise, &code, &mut shot_rng(args.seed, args.shot));
    let syndrome = sample.syndrome(&code, t)?;
    let decoder = SymBreakDecoder::new(&code, cfg)?;
    let outcome = decoder.decode(&syndrome, t)?;
    let json = serde_json::json!({
        "code": code.label,
        "error_type": t,
        "p": args.p,
        "seed": args.seed,
        "shot": args.shot,
        "strategy": decoder.strategy(t),
        "error": sample.error(t).support(),
        "syndrome": syndrome.support(),
        "outcome": outcome,
    });
    let mut text = serde_json::to_vec_pretty(&json).map_err(|e| Failure::Usage(e.to_string()))?;
    text.push(b'\n');
    write_output(args.trace_out.as_deref(), &text)
}
