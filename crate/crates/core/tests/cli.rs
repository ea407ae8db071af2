use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdtb-lab"))
        .args(args)
        .current_dir(cwd)
        .env_remove("PDTB_LAB_DATA")
        .output()
        .unwrap()
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&[], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["train", "--lr", "fast"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn every_subcommand_has_help() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["validate", "stats", "train", "eval", "cv", "recognize", "pipeline", "gradcheck", "synth"] {
        let o = run(&[sub, "--help"], dir.path());
        assert_eq!(o.status.code(), Some(0), "{sub}: {}", text(&o));
    }
}

#[test]
fn synth_then_validate_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["synth", "--seed", "3", "--size", "20", "--out", "data"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let cfg = dir.path().join("data/experiment.toml");
    assert!(cfg.exists());

    let o = run(&["validate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(text(&o).contains("Implicit"), "{}", text(&o));

    let o = run(&["stats", "--config", cfg.to_str().unwrap(), "--axis", "linkage", "--out", "runs"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(text(&o).contains("stand-alone"));
    assert!(dir.path().join("runs/distribution_linkage.tsv").exists());
    assert!(dir.path().join("runs/manifest_stats.json").exists());
}

#[test]
fn corrupted_relation_line_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["synth", "--seed", "4", "--size", "10", "--out", "data"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let rel = dir.path().join("data/relations.jsonl");
    let body = std::fs::read_to_string(&rel).unwrap();
    let mut lines: Vec<&str> = body.lines().collect();
    lines[2] = "{\"doc_id\": \"wsj_0001\", this is not json";
    std::fs::write(&rel, lines.join("\n")).unwrap();
    let cfg = dir.path().join("data/experiment.toml");
    let o = run(&["validate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", text(&o));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.starts_with("error:") && msg.contains("line 3"), "{msg}");
}

#[test]
fn missing_config_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["validate", "--config", "nope.toml"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope.toml"));
}

#[test]
fn training_needs_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    run(&["synth", "--seed", "5", "--size", "10", "--out", "data"], dir.path());
    let cfg = dir.path().join("data/experiment.toml");
    let body = std::fs::read_to_string(&cfg).unwrap();
    let stripped: String = body.lines().filter(|l| !l.starts_with("seed")).collect::<Vec<_>>().join("\n");
    std::fs::write(&cfg, stripped).unwrap();
    let o = run(&["train", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", text(&o));
    assert!(text(&o).contains("seed"));
}

#[test]
fn train_eval_and_gradcheck() {
    let dir = tempfile::tempdir().unwrap();
    run(&["synth", "--seed", "6", "--size", "30", "--out", "data"], dir.path());
    let cfg = dir.path().join("data/experiment.toml");
    let c = cfg.to_str().unwrap();
    let o = run(&["train", "--config", c, "--out", "runs", "--hidden", "20", "--max-epochs", "5"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    for f in ["model.json", "train_log.jsonl", "metrics.tsv", "report.json", "manifest_train.json"] {
        assert!(dir.path().join("runs").join(f).exists(), "{f}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("runs/manifest_train.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    let o = run(&["eval", "--config", c, "--checkpoint", "runs/model.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let o = run(&["gradcheck"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
}
