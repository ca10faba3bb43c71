use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures");

fn fixture(name: &str) -> PathBuf {
    Path::new(FIXTURES).join(name)
}

fn risekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_risekit"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = risekit(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn help_exits_zero() {
    let out = risekit(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in ["build-vocab", "augment", "mine", "train", "grad-check", "score", "evaluate", "pipeline"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn missing_seed_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("x.jsonl");
    let out = risekit(&["augment", "--pairs", s(&fixture("pairs_100.jsonl")), "--out", s(&out_file)]);
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("seed required"));

    let out = risekit(&[
        "pipeline",
        "--pairs",
        s(&fixture("pairs_100.jsonl")),
        "--eval",
        s(&fixture("eval_pipeline.jsonl")),
        "--out-dir",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("seed required"));
}

#[test]
fn stage_failure_names_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let out = risekit(&["build-vocab", "--pairs", "/nonexistent/pairs.jsonl", "--out", s(&dir.path().join("v"))]);
    assert_eq!(out.status.code(), Some(70));
    assert!(stderr(&out).contains("stage build-vocab failed"), "{}", stderr(&out));
}

#[test]
fn invalid_recipe_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = risekit(&[
        "augment",
        "--pairs",
        s(&fixture("pairs_100.jsonl")),
        "--recipe",
        "XX:3",
        "--seed",
        "1",
        "--out",
        s(&dir.path().join("x")),
    ]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn constant_scores_give_undefined_tau_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("scores.tsv");
    let eval = fixture("eval_4x5.jsonl");
    let text: String = fs::read_to_string(fixture("scores_4x5.tsv"))
        .unwrap()
        .lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split('\t').collect();
            f[2] = "0.5";
            f.join("\t") + "\n"
        })
        .collect();
    fs::write(&scores, text).unwrap();
    let report = dir.path().join("report.txt");
    let out = risekit(&["evaluate", "--scores", s(&scores), "--eval", s(&eval), "--out", s(&report)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("undefined tau"));

    let out = risekit(&[
        "evaluate",
        "--scores",
        s(&fixture("scores_4x5.tsv")),
        "--eval",
        s(&eval),
        "--variant",
        "tau_a",
        "--out",
        s(&report),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written = fs::read_to_string(&report).unwrap();
    let first = written.lines().next().unwrap();
    assert!(first.starts_with('{') && first.contains("\"variant\":\"tau_a\""));
    assert!(written.contains("Coh     Con     Flu     Rel     Avg"));
}

#[test]
fn grad_check_threshold_controls_exit_code() {
    let out = risekit(&["grad-check"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("max relative error"));
    let out = risekit(&["grad-check", "--threshold", "1e-30"]);
    assert_eq!(out.status.code(), Some(70));
}

/// Runs the pipeline, then re-runs later stages by hand from its
/// intermediates and checks they reproduce the same bytes.
#[test]
fn stages_rerun_from_pipeline_intermediates() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let config = dir.path().join("pipeline.cfg");
    fs::write(
        &config,
        format!(
            "# small run\npairs = {}\neval = {}\nseed = 3\nepochs = 2\nrecipe = SE:2,SW:1,DW:2,DC:1,SA:1\ntop_n = 3\n",
            s(&fixture("pairs_100.jsonl")),
            s(&fixture("eval_pipeline.jsonl"))
        ),
    )
    .unwrap();
    let out = risekit(&["pipeline", "--config", s(&config), "--out-dir", s(&run), "--set", "dim=16"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let cfg_text = fs::read_to_string(run.join("config.txt")).unwrap();
    assert!(cfg_text.contains("dim = 16\n") && cfg_text.contains("top_n = 3\n"));

    let p = |n: &str| run.join(n);
    let redo = dir.path().join("redo");
    fs::create_dir_all(&redo).unwrap();
    let r = |n: &str| redo.join(n);

    let ok = |args: &[&str]| {
        let o = risekit(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    };
    ok(&["build-vocab", "--pairs", s(&fixture("pairs_100.jsonl")), "--out", s(&r("vocab.txt"))]);
    ok(&[
        "augment", "--pairs", s(&fixture("pairs_100.jsonl")), "--recipe", "SE:2,SW:1,DW:2,DC:1,SA:1",
        "--seed", "3", "--out", s(&r("lexical.jsonl")),
    ]);
    ok(&[
        "mine", "--pairs", s(&fixture("pairs_100.jsonl")), "--checkpoint", s(&p("model_lexical.ckpt")),
        "--vocab", s(&p("vocab.txt")), "--top-n", "3", "--combine-with", s(&p("lexical.jsonl")),
        "--out", s(&r("combined.jsonl")),
    ]);
    ok(&[
        "train", "--examples", s(&p("combined.jsonl")), "--vocab", s(&p("vocab.txt")), "--dim", "16",
        "--epochs", "2", "--seed", "3", "--shared-towers", "--out-checkpoint", s(&r("model_final.ckpt")),
        "--log", s(&r("train_final.tsv")),
    ]);
    ok(&[
        "score", "--checkpoint", s(&p("model_final.ckpt")), "--vocab", s(&p("vocab.txt")),
        "--eval", s(&fixture("eval_pipeline.jsonl")), "--out", s(&r("scores.tsv")),
    ]);
    ok(&[
        "evaluate", "--scores", s(&p("scores.tsv")), "--eval", s(&fixture("eval_pipeline.jsonl")),
        "--out", s(&r("report.txt")),
    ]);
    for name in ["vocab.txt", "lexical.jsonl", "combined.jsonl", "model_final.ckpt", "train_final.tsv", "scores.tsv", "report.txt"] {
        assert_eq!(fs::read(p(name)).unwrap(), fs::read(r(name)).unwrap(), "{name} differs");
    }
    let log = fs::read_to_string(p("train_final.tsv")).unwrap();
    assert_eq!(log.lines().count(), 3);
    let mined = fs::read_to_string(p("mined.jsonl")).unwrap();
    assert!(mined.contains("\"MINED\""));
}
