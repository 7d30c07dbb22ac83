use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use reqarg_core::verify::Layer;
use reqarg_gateway::config::{InputSource, PipelineConfig};
use reqarg_gateway::run::{run_pipeline, EXIT_BLOCKED};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn reqarg(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reqarg"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn ids(v: &Value) -> Vec<&str> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect()
}

#[test]
fn golden_run_exports_grounded_extension() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("ad_sensor_fusion.json");
    let out = reqarg(&["--input", input.to_str().unwrap(), "--semantics", "grounded"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let g = json(dir.path(), "argumentation_graph.json");
    assert_eq!(ids(&g["grounded_extension"]), ["a1", "a5", "a6"]);
    assert_eq!(ids(&g["selected_extension"]), ["a1", "a5", "a6"]);
    assert_eq!(g["arguments"].as_array().unwrap().len(), 6);
    let attacks = g["attacks"].as_array().unwrap();
    assert_eq!(attacks.len(), 7);
    assert!(attacks.iter().all(|a| a["origin"].is_string() && a["confidence"].is_number()));
    for f in [
        "kaos_model.json",
        "kaos_model.xml",
        "trace_cards.json",
        "trace_cards.md",
        "verification_report.json",
        "run_stats.json",
    ] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let stats = json(dir.path(), "run_stats.json");
    assert_eq!(stats["trace_completeness"], 1.0);
    assert_eq!(stats["gci"], 0.0);
}

#[test]
fn arbitration_run_diverges() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("two_session_overlap.json");
    let out = reqarg(
        &[
            "--input",
            input.to_str().unwrap(),
            "--arbitration",
            "--semantics",
            "preferred",
            "--preferred-strategy",
            "priority",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stats = json(dir.path(), "run_stats.json");
    assert!(stats["gci"].as_f64().unwrap() > 0.0);
    assert!(stats["preferred_size"].as_u64().unwrap() > stats["grounded_size"].as_u64().unwrap());
    let g = json(dir.path(), "argumentation_graph.json");
    assert_ne!(g["grounded_extension"], g["selected_extension"]);
}

#[test]
fn theta_sweep_is_non_increasing() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("multi_session_sweep.json");
    let out = reqarg(
        &[
            "--input",
            input.to_str().unwrap(),
            "--classifier",
            "wide",
            "--semantics",
            "preferred",
            "--preferred-strategy",
            "priority",
            "--theta-sweep",
            "0.50,0.60,0.70,0.80,0.85",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = json(dir.path(), "theta_sweep.json");
    let edges: Vec<u64> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["semantic_edges"].as_u64().unwrap())
        .collect();
    assert_eq!(edges.len(), 5);
    assert!(edges.windows(2).all(|w| w[1] <= w[0]), "{edges:?}");
    assert!(edges[0] > 0);
}

#[test]
fn same_seed_same_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let input = fixture("multi_session_sweep.json");
    let args = ["--input", input.to_str().unwrap(), "--classifier", "wide", "--theta", "0.6", "--theta-floor", "0.6"];
    assert!(reqarg(&args, a.path()).status.success());
    assert!(reqarg(&args, b.path()).status.success());
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(!names.is_empty());
    for n in names {
        assert_eq!(std::fs::read(a.path().join(&n)).unwrap(), std::fs::read(b.path().join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn full_verification_with_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let [input, corpus, clauses, hints] =
        ["ad_sensor_fusion.json", "ad_corpus.json", "ad_clauses.json", "ad_kaos_hints.json"].map(fixture);
    let out = reqarg(
        &[
            "--input",
            input.to_str().unwrap(),
            "--corpus",
            corpus.to_str().unwrap(),
            "--clauses",
            clauses.to_str().unwrap(),
            "--hints",
            hints.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(dir.path(), "verification_report.json");
    assert!(report["blocked_at"].is_null());
    assert!(report["compliance"]["gamma"].is_number());
    assert_eq!(report["content_digest_before"], report["content_digest_after"]);
    let xml = std::fs::read_to_string(dir.path().join("kaos_model.xml")).unwrap();
    assert!(xml.contains("level=\"Strategic\""));
}

#[test]
fn scenario_input_writes_log() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = fixture("ad_scripted_agents.json");
    let out = reqarg(&["--scenario", scenario.to_str().unwrap()], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let log = json(dir.path(), "negotiation_log.json");
    assert_eq!(log["sessions"][0]["turns"].as_array().unwrap().len(), 6);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("ad_sensor_fusion.json");
    let out = reqarg(&["--input", input.to_str().unwrap(), "--tau-h", "1.5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = reqarg(&["--input", "/no/such/log.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = reqarg(&["--input", input.to_str().unwrap(), "--semantics", "stable"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = reqarg(
        &["--input", input.to_str().unwrap(), "--preferred-strategy", "priority", "--semantics", "preferred", "--weights", "safety=1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn malformed_log_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = reqarg(&["--input", bad.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn blocked_verification_maps_to_distinct_status() {
    let cfg = PipelineConfig::new(InputSource::Log(fixture("ad_sensor_fusion.json")));
    let mut run = run_pipeline(&cfg).unwrap();
    assert_eq!(run.exit_status(), 0);
    run.verification.blocked_at = Some(Layer::Layer2);
    assert_eq!(run.exit_status(), EXIT_BLOCKED);
}
