use std::fs;

use symbreak_core::registry::Registry;
use symbreak_core::Error;

#[test]
fn every_entry_builds_with_its_parameters() {
    let reg = Registry::bundled();
    let mut count = 0;
    for label in reg.labels() {
        let entry = reg.entry(label).unwrap();
        let code = reg.get(label).unwrap();
        let report = code.check().unwrap();
        assert_eq!(Some(report.n), entry.n, "{label}");
        assert_eq!(Some(report.k), entry.k, "{label}");
        assert_eq!(report.n - report.rank_hx - report.rank_hz, report.k);
        count += 1;
    }
    assert_eq!(count, 14);
}

#[test]
fn bb_instances_have_weight_six_checks() {
    let reg = Registry::bundled();
    for label in reg.labels().filter(|l| l.starts_with("bb_")) {
        let r = reg.get(label).unwrap().check().unwrap();
        assert_eq!((r.row_weight, r.col_weight), ((6, 6), (3, 3)), "{label}");
    }
}

#[test]
fn external_registry_resolves_alist_paths() {
    let dir = std::env::temp_dir().join(format!("symbreak-registry-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join("rep3.alist"), include_str!("../registry/repetition_3.alist")).unwrap();
    fs::write(
        dir.join("codes.json"),
        r#"{
  "rep_hp": {"family": "hp", "h1_alist_path": "rep3.alist", "h2_alist_path": "rep3.alist", "n": 13, "k": 1},
  "wrong_k": {"family": "hp", "h1_alist_path": "rep3.alist", "h2_alist_path": "rep3.alist", "n": 13, "k": 2}
}"#,
    )
    .unwrap();
    let reg = Registry::from_path(&dir.join("codes.json")).unwrap();
    assert_eq!(reg.get("rep_hp").unwrap().k, 1);
    assert!(matches!(reg.get("wrong_k"), Err(Error::Invariant(_))));
    assert!(matches!(reg.get("missing"), Err(Error::UnknownCode(_))));
    fs::remove_dir_all(&dir).unwrap();
}
