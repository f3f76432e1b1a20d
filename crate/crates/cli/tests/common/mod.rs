#![allow(dead_code)]

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_offanchor"))
}

pub fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic").join(name)
}

/// Runs the binary in `dir` with a cleared environment.
pub fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .env_clear()
        .output()
        .expect("spawn offanchor")
}

/// Runs and requires exit code 0.
pub fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = run_in(dir, args);
    assert!(
        out.status.success(),
        "offanchor {args:?} failed with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// `doc_id -> offensive` from a labels TSV.
pub fn offensive_by_id(labels_tsv: &str) -> HashMap<String, bool> {
    labels_tsv
        .lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            (cols[0].to_owned(), cols[1] == "1")
        })
        .collect()
}

/// Ids of a JSONL corpus, in order.
pub fn jsonl_ids(jsonl: &str) -> Vec<String> {
    jsonl
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).expect("json line");
            v["id"].as_str().expect("id").to_owned()
        })
        .collect()
}

pub fn offensive_ratio(ids: &[String], gold: &HashMap<String, bool>) -> f64 {
    let off = ids.iter().filter(|id| gold[id.as_str()]).count();
    off as f64 / ids.len() as f64
}

/// `metric -> value` from an `evaluate` output.
pub fn metrics(tsv: &str) -> HashMap<String, f64> {
    tsv.lines()
        .skip(1)
        .filter_map(|l| l.split_once('\t'))
        .map(|(k, v)| (k.to_owned(), v.parse().expect("metric value")))
        .collect()
}

/// The pipeline of the bundled corpus, run in `dir` with relative paths.
/// Returns the output file names.
pub fn full_pipeline(dir: &Path, seed: &str) -> Vec<&'static str> {
    let raw = bundled("raw.jsonl");
    let labels = bundled("labels.tsv");
    std::fs::copy(&raw, dir.join("raw.jsonl")).unwrap();
    std::fs::copy(&labels, dir.join("labels.tsv")).unwrap();
    let steps: Vec<Vec<&str>> = vec![
        vec!["collect", "--in", "raw.jsonl", "--out", "anchored.jsonl"],
        vec!["dedup", "--in", "anchored.jsonl", "--out", "dedup.jsonl", "--dropped", "dropped.tsv"],
        vec!["split", "--labels", "labels.tsv", "--in", "dedup.jsonl", "--out", "split.txt", "--seed", seed],
        vec![
            "train", "--in", "dedup.jsonl", "--labels", "labels.tsv", "--split", "split.txt", "--features",
            "char+word", "--seed", seed, "--out", "model.txt",
        ],
        vec!["predict", "--model", "model.txt", "--in", "dedup.jsonl", "--split", "split.txt", "--out", "pred.tsv"],
        vec!["evaluate", "--labels", "labels.tsv", "--predictions", "pred.tsv", "--out", "metrics.tsv"],
        vec!["mine-lexicon", "--in", "dedup.jsonl", "--labels", "labels.tsv", "--out", "lexicon.tsv"],
        vec!["emoji-stats", "--in", "dedup.jsonl", "--labels", "labels.tsv", "--out", "emoji.tsv"],
        vec!["match-violence", "--in", "dedup.jsonl", "--out", "violence.tsv"],
        vec!["sample", "--in", "dedup.jsonl", "--k", "3", "--seed", seed, "--out", "sample.jsonl"],
        vec![
            "report", "--labels", "labels.tsv", "--emoji-stats", "emoji.tsv", "--lexicon", "lexicon.tsv",
            "--metrics", "metrics.tsv", "--out", "report.txt",
        ],
    ];
    for step in &steps {
        ok(dir, step);
    }
    vec![
        "anchored.jsonl",
        "dedup.jsonl",
        "dropped.tsv",
        "split.txt",
        "model.txt",
        "pred.tsv",
        "metrics.tsv",
        "lexicon.tsv",
        "emoji.tsv",
        "violence.tsv",
        "sample.jsonl",
        "report.txt",
    ]
}

/// Judgments TSV in which annotator `b` copies annotator `a`.
pub fn duplicate_judgments(n_docs: usize) -> String {
    let mut out = String::from("doc_id\tannotator_id\tjob\tlabel\ttimestamp\n");
    for i in 0..n_docs {
        let label = if (i * 7) % 3 == 0 { "1" } else { "0" };
        for ann in ["a", "b"] {
            out.push_str(&format!("d{i:03}\t{ann}\toffensive\t{label}\t2021-05-01T00:00:00Z\n"));
        }
    }
    out
}
