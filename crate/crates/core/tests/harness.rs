use symbreak_core::codes::ErrorType;
use symbreak_core::harness::{
    bench_decoders, run_experiment, run_experiment_on, sweep, wilson_interval, DecoderSpec, ExperimentSpec, SweepAxis,
};
use symbreak_core::noise::NoiseModel;
use symbreak_core::registry::Registry;

fn spec(code: &str, p: f64, decoder: &str, shots: u64, seed: u64) -> ExperimentSpec {
    ExperimentSpec::new(code, NoiseModel::Depolarizing { p }, DecoderSpec::from_name(decoder).unwrap(), shots, seed)
}

#[test]
fn replay_is_independent_of_thread_count() {
    let reg = Registry::bundled();
    let mut a = spec("bb_72_12_6", 0.02, "symbreak", 400, 5);
    a.record_shots = true;
    a.threads = Some(1);
    let mut b = a.clone();
    b.threads = Some(3);
    let (ra, rb) = (run_experiment(&a, &reg).unwrap(), run_experiment(&b, &reg).unwrap());
    assert_eq!(ra.failures, rb.failures);
    assert_eq!(ra.stop_reasons, rb.stop_reasons);
    let failed = |r: &symbreak_core::harness::LerResult| -> Vec<(u64, bool)> {
        r.shot_records.iter().map(|s| (s.shot, s.failed)).collect()
    };
    assert_eq!(failed(&ra), failed(&rb));
    assert!(ra.failures > 0, "p=0.02 should produce some failures in 400 shots");

    let mut c = a.clone();
    c.seed = 6;
    assert_ne!(failed(&ra), failed(&run_experiment(&c, &reg).unwrap()));
}

#[test]
fn bench_matches_independent_runs_on_failures() {
    // The bench decodes the shots warmup..warmup+shots of the same stream.
    let code = Registry::bundled().get("bb_72_12_6").unwrap();
    let noise = NoiseModel::Depolarizing { p: 0.02 };
    let decoders = [DecoderSpec::from_name("bp").unwrap(), DecoderSpec::from_name("symbreak").unwrap()];
    let bench = bench_decoders(&code, &noise, &decoders, &[ErrorType::X, ErrorType::Z], 300, 0, 9).unwrap();
    for (d, b) in decoders.iter().zip(&bench) {
        let s = ExperimentSpec::new("bb_72_12_6", noise, d.clone(), 300, 9);
        let r = run_experiment_on(&code, &s).unwrap();
        assert_eq!((r.failures, &r.stop_reasons), (b.failures, &b.stop_reasons), "{}", d.name());
    }
}

#[test]
fn null_decoder_overhead_is_small() {
    let code = Registry::bundled().get("bb_72_12_6").unwrap();
    let noise = NoiseModel::Depolarizing { p: 0.003 };
    let decoders = [DecoderSpec::Null, DecoderSpec::from_name("bp").unwrap()];
    let r = bench_decoders(&code, &noise, &decoders, &[ErrorType::X, ErrorType::Z], 5000, 200, 1).unwrap();
    assert!(
        r[0].mean_time_us < 0.05 * r[1].mean_time_us,
        "null {} us vs bp {} us",
        r[0].mean_time_us,
        r[1].mean_time_us
    );
}

#[test]
fn small_code_matches_exhaustive_oracle() {
    let reg = Registry::bundled();
    let mut osd = spec("hp_13_1_3", 0.01, "bp_osd0", 10_000, 3);
    osd.error_types = vec![ErrorType::X];
    let mut ml = osd.clone();
    ml.decoder = DecoderSpec::Ml;
    let (r, m) = (run_experiment(&osd, &reg).unwrap(), run_experiment(&ml, &reg).unwrap());
    assert!(r.ler < 1e-2, "bp_osd0 LER {}", r.ler);
    assert_eq!(r.syndrome_violations, 0);
    assert!(r.ci_low <= m.ci_high && m.ci_low <= r.ci_high, "{r:?} vs {m:?}");
}

#[test]
fn sweep_over_p_is_monotone_at_high_rates() {
    let reg = Registry::bundled();
    let rs = sweep(&spec("bb_72_12_6", 0.01, "bp", 1500, 2), SweepAxis::P, &[0.01, 0.04], &reg).unwrap();
    assert_eq!(rs.len(), 2);
    assert!(rs[0].ler < rs[1].ler);
    assert_eq!(rs[1].p, 0.04);
}

#[test]
fn wilson_interval_reference_values() {
    // Closed form evaluated independently: 10 failures in 100 shots.
    let (lo, hi) = wilson_interval(10, 100);
    assert!((lo - 0.05522914).abs() < 1e-6, "{lo}");
    assert!((hi - 0.17436566).abs() < 1e-6, "{hi}");
    assert_eq!(wilson_interval(0, 50).0, 0.0);
    assert_eq!(wilson_interval(50, 50).1, 1.0);
}
