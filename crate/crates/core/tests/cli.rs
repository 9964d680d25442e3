use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic")
}

fn ape(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ape"))
        .args(args)
        .env_remove("APE_LEXICON")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn lines(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// Copies the first `n` decisions of the bundled corpus into `dir`.
fn small_corpus(dir: &Path, n: usize) {
    let meta: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(corpus().join("metadata.json")).unwrap()).unwrap();
    let keep: Vec<Value> = meta.into_iter().take(n).collect();
    for m in &keep {
        let f = m["filename"].as_str().unwrap();
        std::fs::copy(corpus().join(f), dir.join(f)).unwrap();
    }
    std::fs::write(dir.join("metadata.json"), serde_json::to_string(&keep).unwrap()).unwrap();
    let ids: Vec<&str> = keep.iter().map(|m| m["case_id"].as_str().unwrap()).collect();
    let ann: String = std::fs::read_to_string(corpus().join("annotations.jsonl"))
        .unwrap()
        .lines()
        .filter(|l| ids.iter().any(|id| l.contains(&format!("\"{id}\""))))
        .map(|l| format!("{l}\n"))
        .collect();
    std::fs::write(dir.join("annotations.jsonl"), ann).unwrap();
}

#[test]
fn extract_rule_based_writes_one_record_per_decision() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("extract.jsonl");
    let hist = tmp.path().join("hist.csv");
    let o = ape(&["extract", "--corpus", s(&corpus()), "--rule-based", "--out", s(&out), "--histogram", s(&hist)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let records = lines(&out);
    assert_eq!(records.len(), 40);
    let ids: Vec<&str> = records.iter().map(|r| r["case_id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert_eq!(records[0]["months"], 30);
    assert!(std::fs::read_to_string(&hist).unwrap().starts_with("bucket_start,bucket_end,count\n"));
}

#[test]
fn eval_with_fewer_decisions_than_folds_fails_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    small_corpus(tmp.path(), 3);
    let o = ape(&[
        "eval",
        "--corpus",
        s(tmp.path()),
        "--annotations",
        s(&tmp.path().join("annotations.jsonl")),
        "--folds",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("fewer decisions than folds"));
}

#[test]
fn stats_reports_corpus_size() {
    let o = ape(&["stats", "--corpus", s(&corpus())]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["num_cases"], 40);
    assert!(v["num_sentences"].as_u64().unwrap() >= 40 * 30);
    for key in ["num_words", "sentence_length_mean", "sentence_length_std"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn usage_errors() {
    let o = ape(&["stats", "--corpus", "x", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(ape(&["extract", "--corpus", s(&corpus())]).status.code(), Some(1));
    assert_eq!(ape(&["--help"]).status.code(), Some(0));
    assert_eq!(ape(&["stats", "--corpus", "/no/such/dir"]).status.code(), Some(1));
}

#[test]
fn output_does_not_depend_on_job_count() {
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for jobs in ["1", "4"] {
        let out = tmp.path().join(format!("detect{jobs}.jsonl"));
        let o = ape(&["detect", "--corpus", s(&corpus()), "--jobs", jobs, "--out", s(&out)]);
        assert!(o.status.success());
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn segment_and_prelabel_cover_every_sentence() {
    let tmp = tempfile::tempdir().unwrap();
    small_corpus(tmp.path(), 2);
    let seg = tmp.path().join("seg.jsonl");
    let pre = tmp.path().join("pre.jsonl");
    assert!(ape(&["segment", "--corpus", s(tmp.path()), "--out", s(&seg)]).status.success());
    assert!(ape(&["prelabel", "--corpus", s(tmp.path()), "--out", s(&pre)]).status.success());
    let seg = lines(&seg);
    let pre = lines(&pre);
    assert_eq!(seg.len(), pre.len());
    for (a, b) in seg.iter().zip(&pre) {
        assert_eq!(a["index"], b["sentence_index"]);
        let text = a["text"].as_str().unwrap();
        assert_eq!(b["auto_negative"].as_bool().unwrap(), !text.contains("מאסר"), "{text}");
    }
}

#[test]
fn lexicon_from_environment_and_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let mut lex: Value = serde_json::from_str(ape::lexicon::Lexicon::default_json()).unwrap();
    lex["threshold"] = Value::from(100.0);
    let lex_path = tmp.path().join("strict.json");
    std::fs::write(&lex_path, lex.to_string()).unwrap();
    let out = tmp.path().join("d.jsonl");
    let o = Command::new(env!("CARGO_BIN_EXE_ape"))
        .args(["detect", "--corpus", s(&corpus()), "--out", s(&out)])
        .env("APE_LEXICON", &lex_path)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(lines(&out).iter().all(|r| r["sentence_index"].is_null()));

    // The flag wins over the lexicon file.
    let o = Command::new(env!("CARGO_BIN_EXE_ape"))
        .args(["detect", "--corpus", s(&corpus()), "--threshold", "2", "--out", s(&out)])
        .env("APE_LEXICON", &lex_path)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(lines(&out).iter().all(|r| !r["sentence_index"].is_null()));

    let o = ape(&["detect", "--corpus", s(&corpus()), "--set", "lexicon.nope=1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn train_then_extract_with_model() {
    let tmp = tempfile::tempdir().unwrap();
    let model = tmp.path().join("rf.json");
    let ann = corpus().join("annotations.jsonl");
    let before = std::fs::read(&ann).unwrap();
    let o = ape(&[
        "train",
        "--corpus",
        s(&corpus()),
        "--annotations",
        s(&ann),
        "--model",
        "rf",
        "--seed",
        "3",
        "--set",
        "training.forest.n_trees=25",
        "--out",
        s(&model),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&model).unwrap()).unwrap();
    assert_eq!(m["kind"], "tree_ensemble");
    assert_eq!(m["rng_seed"], 3);
    assert_eq!(m["params"]["state"]["trees"].as_array().unwrap().len(), 25);

    let out = tmp.path().join("x.jsonl");
    let o = ape(&["extract", "--corpus", s(&corpus()), "--model-path", s(&model), "--out", s(&out)]);
    assert!(o.status.success());
    let exact = lines(&out).iter().filter(|r| !r["months"].is_null()).count();
    assert_eq!(exact, 40);
    assert_eq!(std::fs::read(&ann).unwrap(), before);
}

#[test]
fn missing_metadata_entry_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    small_corpus(tmp.path(), 2);
    std::fs::write(tmp.path().join("stray.txt"), "מאסר.").unwrap();
    let o = ape(&["stats", "--corpus", s(tmp.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stray.txt"));
}

#[test]
fn unwritable_output_is_an_internal_error() {
    let o = ape(&["stats", "--corpus", s(&corpus()), "--out", "/no/such/dir/out.json"]);
    assert_eq!(o.status.code(), Some(2));
}
