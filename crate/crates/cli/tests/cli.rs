use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use jsonschema::{Registry, Validator};
use serde_json::Value;

const BASE: &str = "https://parmirror.invalid/schemas/";
const SCHEMAS: [&str; 3] = ["tms_report", "sweep", "walls"];

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_parmirror"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn schema(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("schemas/{name}.schema.json"));
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn validate(name: &str, doc: &Value) {
    let mut registry = Registry::new();
    for s in SCHEMAS {
        registry = registry.add(format!("{BASE}{s}.schema.json"), schema(s)).unwrap();
    }
    let registry = registry.prepare().unwrap();
    let validator: Validator = jsonschema::options()
        .with_registry(&registry)
        .build(&schema(name))
        .unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn lemma_prints_factorial() {
    let out = run(&["lemma", "--n", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "720");
}

#[test]
fn tms_report_validates_and_is_equal() {
    for scale in ["margin", "1"] {
        let out = run(&["tms", "--n", "3", "--g", "2", "--marked", "2", "--deg", "1", "--seed", "4", "--scale", scale]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let doc = json_of(&out);
        validate("tms_report", &doc);
        assert_eq!(doc["equal"], Value::Bool(true));
    }
}

#[test]
fn tms_output_is_deterministic() {
    let args = ["tms", "--n", "2", "--g", "3", "--marked", "2", "--seed", "9", "--scale", "1"];
    let a = run(&args);
    let b = run(&[&["--threads", "1"][..], &args[..]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn weights_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(&["tms", "--n", "2", "--g", "2", "--marked", "2", "--seed", "3", "--scale", "1"]);
    let weights = json_of(&first)["weights"].clone();
    let wpath = dir.path().join("w.json");
    fs::write(&wpath, weights.to_string()).unwrap();
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "tms", "--n", "2", "--g", "2", "--marked", "2",
        "--weights", wpath.to_str().unwrap(), "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let saved: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(saved, json_of(&first));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["tms", "--n", "4", "--g", "2"][..],
        &["tms", "--n", "2", "--g", "1"][..],
        &["tms", "--n", "2", "--g", "2", "--scale", "abc"][..],
        &["tms", "--n", "2"][..],
        &["lemma", "--n", "11"][..],
        &["bogus"][..],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bad_weight_files_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let wpath = dir.path().join("w.json");
    // weights at a point must be strictly increasing
    fs::write(&wpath, r#"{"points": [["1/3", "1/3"]]}"#).unwrap();
    let out = run(&["tms", "--n", "2", "--g", "2", "--weights", wpath.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "not json").unwrap();
    let out = run(&["tms", "--n", "2", "--g", "2", "--weights", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    fs::write(
        &cfg,
        "[ranges]\nn = [2, 3, 4]\ng = [2]\nmarked = [1, 2]\ndeg = [0, -1]\n\n[sampling]\nseeds = [1, 2]\nscales = [\"margin\", \"1/2\"]\n",
    )
    .unwrap();
    let csv = dir.path().join("summary.csv");
    let out = run(&["sweep", "--config", cfg.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    // n = 4 instances are recorded as errors, so the sweep as a whole fails
    assert_eq!(out.status.code(), Some(1));
    let doc = json_of(&out);
    validate("sweep", &doc);
    // for n = 2 the margin is 1/2, so the two scales give the same instance
    assert_eq!(doc["summary"]["total"], 40);
    assert_eq!(doc["summary"]["equal"], 24);
    assert_eq!(doc["summary"]["errors"], 16);
    let rows = fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 41);

    fs::write(&cfg, "[ranges]\nn = [2]\ng = [2]\nmarked = [1]\ndeg = [0]\n\n[sampling]\nseeds = [1]\nscales = [\"margin\"]\n").unwrap();
    let a = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    let b = run(&["--threads", "1", "sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    fs::write(&cfg, "[ranges]\nn = \"two\"\n").unwrap();
    assert_eq!(run(&["sweep", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn walls_validate() {
    let out = run(&["walls", "--n", "3", "--g", "2", "--marked", "2", "--deg", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    validate("walls", &doc);
    assert!(!doc["walls"].as_array().unwrap().is_empty());
}

#[test]
fn census_csv() {
    let out = run(&["variant", "--n", "2", "--g", "2", "--marked", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("perm,m,s,d_n,degree"));
    assert!(lines.count() > 0);
}

#[test]
fn other_subcommands() {
    let out = run(&["orbits", "--n", "3", "--marked", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "12");
    let out = run(&["section", "--n", "5", "--g", "3", "--marked", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["stringy", "--n", "3", "--g", "2", "--marked", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["fixed_locus"]["orbit_count"], "2");
}
