mod common;

use std::collections::HashMap;

use common::*;
use offanchor::corpus::labels_to_tsv;
use offanchor::synth::pipeline_corpus;

#[test]
fn bundled_corpus_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["synth", "--kind", "pipeline", "--n", "3000", "--seed", "7", "--out", "raw.jsonl", "--labels-out", "labels.tsv"],
    );
    assert_eq!(read(dir.path(), "raw.jsonl"), std::fs::read_to_string(bundled("raw.jsonl")).unwrap());
    assert_eq!(read(dir.path(), "labels.tsv"), std::fs::read_to_string(bundled("labels.tsv")).unwrap());
    let direct = pipeline_corpus(3000, 7).unwrap();
    assert_eq!(read(dir.path(), "labels.tsv"), labels_to_tsv(&direct.labels));
}

#[test]
fn collect_enriches_offensive_share() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--kind", "enrichment", "--seed", "5", "--out", "raw.jsonl", "--labels-out", "labels.tsv"]);
    ok(d, &["collect", "--in", "raw.jsonl", "--out", "anchored.jsonl"]);
    let gold = offensive_by_id(&read(d, "labels.tsv"));
    let before = offensive_ratio(&jsonl_ids(&read(d, "raw.jsonl")), &gold);
    let after = offensive_ratio(&jsonl_ids(&read(d, "anchored.jsonl")), &gold);
    assert!(after >= 10.0 * before, "{after} vs {before}");
}

#[test]
fn kappa_of_duplicated_annotator_is_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("j.tsv"), duplicate_judgments(30)).unwrap();
    let out = ok(dir.path(), &["kappa", "--judgments", "j.tsv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "1");
    ok(dir.path(), &["kappa", "--judgments", "j.tsv", "--out", "pairs.tsv"]);
    assert!(read(dir.path(), "pairs.tsv").contains("a\tb\t30\t1\n"));
    // below the shared-document minimum there is no qualifying pair
    std::fs::write(dir.path().join("few.tsv"), duplicate_judgments(10)).unwrap();
    assert_eq!(code(&run_in(dir.path(), &["kappa", "--judgments", "few.tsv"])), 2);
}

#[test]
fn full_pipeline_reaches_macro_f1() {
    let dir = tempfile::tempdir().unwrap();
    full_pipeline(dir.path(), "11");
    let m = metrics(&read(dir.path(), "metrics.tsv"));
    assert!(m["macro_f1"] >= 0.95, "macro-F1 {}", m["macro_f1"]);
    // the test split holds only documents that survived collect and dedup
    let kept: Vec<String> = jsonl_ids(&read(dir.path(), "dedup.jsonl"));
    let preds = read(dir.path(), "pred.tsv");
    for line in preds.lines().skip(1) {
        let id = line.split('\t').next().unwrap();
        assert!(kept.iter().any(|k| k == id));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let files = full_pipeline(dir.path(), "3");
    let first: Vec<String> = files.iter().map(|f| read(dir.path(), f)).collect();
    // second run in place: inputs identical, so outputs must be too
    full_pipeline(dir.path(), "3");
    for (f, before) in files.iter().zip(&first) {
        assert_eq!(&read(dir.path(), f), before, "{f} changed");
    }
}

#[test]
fn manifests_record_digests() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    full_pipeline(d, "1");
    let manifest: serde_json::Value = serde_json::from_str(&read(d, "model.txt.manifest.json")).unwrap();
    assert_eq!(manifest["command"], "train");
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    for (section, name) in [("inputs", "labels.tsv"), ("inputs", "split.txt"), ("outputs", "model.txt")] {
        let bytes = std::fs::read(d.join(name)).unwrap();
        let digest = manifest[section][name].as_str().unwrap_or_else(|| panic!("{section} lacks {name}"));
        assert_eq!(digest, sha256(&bytes));
    }
    // the same settings hash the same way across commands runs
    full_pipeline(d, "1");
    let again: serde_json::Value = serde_json::from_str(&read(d, "model.txt.manifest.json")).unwrap();
    assert_eq!(again["config_hash"], manifest["config_hash"]);
    ok(d, &["train", "--in", "dedup.jsonl", "--labels", "labels.tsv", "--c", "2", "--out", "m2.txt"]);
    let other: serde_json::Value = serde_json::from_str(&read(d, "m2.txt.manifest.json")).unwrap();
    assert_ne!(other["config_hash"], manifest["config_hash"]);
    for name in ["anchored.jsonl", "dedup.jsonl", "split.txt", "pred.tsv", "metrics.tsv", "report.txt"] {
        assert!(d.join(format!("{name}.manifest.json")).exists(), "{name}");
    }
}

fn sha256(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

#[test]
fn report_numbers_rederive_from_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    full_pipeline(d, "2");
    let report = read(d, "report.txt");
    let gold = offensive_by_id(&read(d, "labels.tsv"));
    let n_off = gold.values().filter(|&&v| v).count();
    assert!(report.contains(&format!("class distribution ({} documents)", gold.len())));
    let pct = 100.0 * n_off as f64 / gold.len() as f64;
    assert!(report.contains(&format!("\noffensive\t{n_off}\t{pct:.2}\n")));
    // table rows are copied verbatim
    for table in ["emoji.tsv", "lexicon.tsv", "metrics.tsv"] {
        let text = read(d, table);
        for line in text.lines().take(21) {
            assert!(report.contains(&format!("{line}\n")), "{table}: {line}");
        }
    }
}

#[test]
fn aggregate_queue_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut j = String::from("doc_id\tannotator_id\tjob\tlabel\ttimestamp\n");
    let votes: [(&str, [&str; 3]); 4] = [
        ("x1", ["1", "1", "1"]),
        ("x2", ["1", "0", "0"]),
        ("x3", ["0", "0", "0"]),
        ("x4", ["1", "1", "0"]),
    ];
    for (doc, labels) in votes {
        for (ann, label) in ["a", "b", "c"].iter().zip(labels) {
            j.push_str(&format!("{doc}\t{ann}\toffensive\t{label}\t2021-05-01T00:00:00Z\n"));
        }
    }
    j.push_str("x1\ta\tvulgar\t1\t2021-05-01T00:00:00Z\n");
    std::fs::write(d.join("j.tsv"), j).unwrap();
    ok(d, &["aggregate", "--judgments", "j.tsv", "--out", "labels.tsv", "--queue", "queue.tsv"]);
    let labels = offensive_by_id(&read(d, "labels.tsv"));
    assert_eq!(labels, HashMap::from([
        ("x1".to_owned(), true),
        ("x2".to_owned(), false),
        ("x3".to_owned(), false),
        ("x4".to_owned(), true),
    ]));
    assert!(read(d, "labels.tsv").contains("x1\t1\t\t1\t0"));
    let queue = read(d, "queue.tsv");
    let queued: Vec<&str> = queue.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(queued, ["x2", "x4"]);
    // an expert flips x2
    let filled = queue.replace("x2\toffensive\t0\tmajority\t0:2,1:1\t", "x2\toffensive\t0\tmajority\t0:2,1:1\t1");
    assert_ne!(filled, queue, "queue layout changed: {queue}");
    std::fs::write(d.join("filled.tsv"), filled).unwrap();
    ok(d, &["aggregate", "--judgments", "j.tsv", "--out", "final.tsv", "--overrides", "filled.tsv"]);
    assert_eq!(offensive_by_id(&read(d, "final.tsv"))["x2"], true);
}

#[test]
fn gate_scores_annotators() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut j = String::from("doc_id\tannotator_id\tjob\tlabel\ttimestamp\n");
    for (doc, good, bad) in [("t1", "1", "0"), ("t2", "0", "1"), ("t3", "1", "1"), ("d1", "1", "0")] {
        j.push_str(&format!("{doc}\tgood\toffensive\t{good}\t2021-05-01T00:00:00Z\n"));
        j.push_str(&format!("{doc}\tbad\toffensive\t{bad}\t2021-05-01T00:00:00Z\n"));
    }
    std::fs::write(d.join("j.tsv"), j).unwrap();
    std::fs::write(d.join("answers.tsv"), "t1\t1\nt2\t0\nt3\t1\n").unwrap();
    ok(d, &["gate", "--judgments", "j.tsv", "--answers", "answers.tsv", "--threshold", "0.8", "--out", "gate.tsv"]);
    let gate = read(d, "gate.tsv");
    assert!(gate.contains("good\t3\t1\t1\n"), "{gate}");
    assert!(gate.lines().any(|l| l.starts_with("bad\t3\t0.333") && l.ends_with("\t0")), "{gate}");
    ok(d, &["aggregate", "--judgments", "j.tsv", "--answers", "answers.tsv", "--threshold", "0.8", "--out", "l.tsv"]);
    assert_eq!(read(d, "l.tsv"), "doc_id\toffensive\thate_targets\tvulgar\tviolence\nd1\t1\t\t0\t0\n");
}

#[test]
fn normalize_config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let defaults = ok(d, &["normalize", "--print-defaults"]).stdout;
    let defaults = String::from_utf8(defaults).unwrap();
    assert!(defaults.contains("squash_repeats_over=2"));
    std::fs::write(d.join("norm.cfg"), defaults.replace("replace_urls_with=URL", "replace_urls_with=LINK")).unwrap();
    std::fs::write(
        d.join("c.jsonl"),
        "{\"id\":\"1\",\"text\":\"شوووف http://x.y @ali\",\"created_at\":\"2021-01-01T00:00:00Z\"}\n",
    )
    .unwrap();
    ok(d, &["normalize", "--in", "c.jsonl", "--out", "n.jsonl", "--config", "norm.cfg"]);
    assert!(read(d, "n.jsonl").contains("\"text\":\"شووف LINK @USER\""));
    // flags win over the file
    ok(d, &["normalize", "--in", "c.jsonl", "--out", "n2.jsonl", "--config", "norm.cfg", "--set", "replace_urls_with=URL"]);
    assert!(read(d, "n2.jsonl").contains("\"text\":\"شووف URL @USER\""));
    // normalizing twice changes nothing
    ok(d, &["normalize", "--in", "n2.jsonl", "--out", "n3.jsonl"]);
    assert_eq!(read(d, "n2.jsonl"), read(d, "n3.jsonl"));
}

#[test]
fn explain_a_corpus_document() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    full_pipeline(d, "4");
    let id = jsonl_ids(&read(d, "dedup.jsonl"))[0].clone();
    let args = ["explain", "--model", "model.txt", "--in", "dedup.jsonl", "--doc-id", &id, "--samples", "200", "--out", "ex.tsv"];
    ok(d, &args);
    let first = read(d, "ex.tsv");
    assert!(first.starts_with("rank\tposition\ttoken\tweight\n1\t"));
    ok(d, &args);
    assert_eq!(read(d, "ex.tsv"), first);
    ok(d, &["explain", "--model", "model.txt", "--text", "يا كلب", "--out", "ex2.tsv"]);
    assert!(read(d, "ex2.tsv").contains("كلب"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run_in(d, &["--help"])), 0);
    assert_eq!(code(&run_in(d, &["--version"])), 0);
    assert_eq!(code(&run_in(d, &["train", "--help"])), 0);
    // usage errors
    assert_eq!(code(&run_in(d, &[])), 1);
    assert_eq!(code(&run_in(d, &["frobnicate"])), 1);
    assert_eq!(code(&run_in(d, &["collect", "--in", "x.jsonl"])), 1);
    assert_eq!(code(&run_in(d, &["split", "--labels", "l.tsv", "--out", "s", "--ratios", "0.5,0.6,0.1"])), 1);
    assert_eq!(code(&run_in(d, &["train", "--in", "a", "--labels", "b", "--out", "c", "--features", "bytes"])), 1);
    assert_eq!(code(&run_in(d, &["train", "--in", "a", "--labels", "b", "--out", "c", "--char-range", "5,2"])), 1);
    assert_eq!(code(&run_in(d, &["normalize", "--print-defaults", "--in", "x"])), 1);
    assert_eq!(code(&run_in(d, &["explain", "--model", "m", "--text", "x", "--in", "c", "--doc-id", "1", "--out", "o"])), 1);
    // data errors
    let missing = run_in(d, &["collect", "--in", "missing.jsonl", "--out", "o.jsonl"]);
    assert_eq!(code(&missing), 2);
    let msg = String::from_utf8(missing.stderr).unwrap();
    assert_eq!(msg.lines().count(), 1, "{msg}");
    assert!(msg.contains("missing.jsonl"));
    std::fs::write(d.join("bad.jsonl"), "{\"id\": 1}\n").unwrap();
    let bad = run_in(d, &["collect", "--in", "bad.jsonl", "--out", "o.jsonl"]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8(bad.stderr).unwrap().contains("line 1"));
    assert!(!d.join("o.jsonl").exists());
    std::fs::write(d.join("l.tsv"), "doc_id\toffensive\thate_targets\tvulgar\tviolence\na\t2\t\t0\t0\n").unwrap();
    assert_eq!(code(&run_in(d, &["split", "--labels", "l.tsv", "--out", "s.txt"])), 2);
}

#[test]
fn failed_run_leaves_previous_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("out.jsonl"), "previous\n").unwrap();
    std::fs::write(d.join("bad.jsonl"), "not json\n").unwrap();
    assert_eq!(code(&run_in(d, &["dedup", "--in", "bad.jsonl", "--out", "out.jsonl"])), 2);
    assert_eq!(read(d, "out.jsonl"), "previous\n");
    let leftovers: Vec<_> = std::fs::read_dir(d).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(leftovers.len(), 2, "{leftovers:?}");
}
