use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use offanchor::annotation::{
    adjudication_queue, adjudication_to_tsv, aggregate, agreement_fractions, apply_overrides,
    assemble_labels, avg_pairwise_kappa, gate_all, parse_judgments, parse_overrides, Judgment, QcGate,
};
use offanchor::classifier::{
    explain, evaluate_predictions, predictions_to_tsv, parse_predictions, ExplainConfig, FeatureConfig,
    Prediction, TextClassifier, TrainConfig,
};
use offanchor::corpus::{
    corpus_to_jsonl, labels_to_tsv, parse_corpus, parse_labels, stratified_split, CorpusFormat,
    DatasetSplit, Document, LabelRecord,
};
use offanchor::emoji::{emoji_stats, filter_by_seeds, sample_per_emoji, SeedInventory};
use offanchor::lexicon::{
    lexicon_to_tsv, mine_class_lexicon, parse_decimal, target_distribution, Gazetteer,
    LexiconConfig,
};
use offanchor::normalize::{dedup, normalize, tokenize, NearDupPolicy, NormalizationConfig};
use offanchor::synth::{enrichment_corpus, pipeline_corpus, separable_corpus, EnrichmentConfig};
use offanchor::tsv::escape;
use offanchor::violence::{ClassSet, ExpansionTable, PatternRule, ViolenceMatcher};

use crate::run::{usage, Run};
use crate::{Command, CorpusIn, NormArgs};

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Collect { corpus, seeds, out } => collect(&corpus, seeds.as_deref(), &out),
        Command::Dedup { corpus, out, dropped, shingle_size, threshold, min_tokens, norm } => {
            let mut policy = NearDupPolicy::default();
            if let Some(s) = shingle_size {
                policy.shingle_size = s;
            }
            if let Some(t) = threshold {
                policy.jaccard_threshold = t;
            }
            if let Some(m) = min_tokens {
                policy.min_tokens = m;
            }
            policy.validate().map_err(|e| usage(e.to_string()))?;
            dedup_cmd(&corpus, &out, dropped.as_deref(), &policy, &norm)
        }
        Command::Normalize { input, format, out, print_defaults, norm } => {
            if print_defaults {
                print!("{}", NormalizationConfig::default().to_kv_text());
                return Ok(());
            }
            let (Some(input), Some(out)) = (input, out) else {
                return Err(usage("normalize needs --in and --out"));
            };
            normalize_cmd(&CorpusIn { input, format }, &out, &norm)
        }
        Command::Split { labels, input, out, ratios, seed } => {
            let mut run = Run::new("split");
            run.seed(seed);
            run.setting("ratios", format!("{},{},{}", ratios.train, ratios.dev, ratios.test));
            let mut labels = read_labels(&mut run, &labels)?;
            if let Some(input) = input {
                let docs = read_corpus(&mut run, &CorpusIn { input, format: None })?;
                let ids: HashSet<&str> = docs.iter().map(|d| d.id.as_str()).collect();
                if let Some(d) = docs.iter().find(|d| !labels.iter().any(|l| l.doc_id == d.id)) {
                    bail!("document {} has no label", d.id);
                }
                labels.retain(|l| ids.contains(l.doc_id.as_str()));
            }
            let outcome = stratified_split(&labels, ratios, seed)?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            run.write(&out, &outcome.split.to_text())?;
            run.finish(&out)
        }
        Command::MineLexicon {
            corpus,
            labels,
            out,
            class,
            min_valence,
            min_freq,
            targets_out,
            gazetteer,
            target,
            norm,
        } => {
            let cfg = LexiconConfig {
                min_valence: parse_decimal(&min_valence).map_err(|e| usage(format!("--min-valence: {e}")))?,
                min_freq,
            };
            let mut run = Run::new("mine-lexicon");
            run.setting("class", class.as_str());
            run.setting("min_valence", &min_valence);
            run.setting("min_freq", min_freq);
            let norm = read_norm(&mut run, &norm)?;
            let docs = read_corpus(&mut run, &corpus)?;
            let labels = read_labels(&mut run, &labels)?;
            let entries = mine_class_lexicon(&docs, &labels, class, &norm, &cfg)?;
            run.write(&out, &lexicon_to_tsv(&entries))?;
            if let Some(targets_out) = targets_out {
                let gaz = match gazetteer {
                    Some(path) => {
                        let text = run.read(&path)?;
                        Gazetteer::parse(&text, &norm).with_context(|| format!("parsing {}", path.display()))?
                    }
                    None => Gazetteer::default_religion(&norm),
                };
                if let Some(t) = target {
                    run.setting("target", t);
                }
                let shares = target_distribution(&docs, &labels, &gaz, target, &norm)?;
                let mut tsv = String::from("group\tcount\tfraction\n");
                for (group, share) in &shares {
                    let _ = writeln!(tsv, "{}\t{}\t{:.6}", escape(group), share.count, share.fraction);
                }
                run.write(&targets_out, &tsv)?;
            }
            eprintln!("{} terms", entries.len());
            run.finish(&out)
        }
        Command::EmojiStats { corpus, labels, seeds, out } => {
            let mut run = Run::new("emoji-stats");
            let inv = read_seeds(&mut run, seeds.as_deref())?;
            let docs = read_corpus(&mut run, &corpus)?;
            let labels = read_labels(&mut run, &labels)?;
            let stats = emoji_stats(&docs, &labels)?;
            run.write(&out, &stats.to_tsv(Some(&inv)))?;
            run.finish(&out)
        }
        Command::Sample { corpus, seeds, k, seed, out } => {
            if k == 0 {
                return Err(usage("--k must be at least 1"));
            }
            let mut run = Run::new("sample");
            run.seed(seed);
            run.setting("k", k);
            let inv = read_seeds(&mut run, seeds.as_deref())?;
            let docs = read_corpus(&mut run, &corpus)?;
            let samples = sample_per_emoji(&docs, &inv, k, seed)?;
            let mut jsonl = String::new();
            for (anchor, picked) in &samples {
                for doc in picked {
                    let mut value: serde_json::Value = serde_json::from_str(&doc.to_json_line())?;
                    value["anchor"] = anchor.as_str().into();
                    value["alias"] = inv.alias(anchor).into();
                    jsonl.push_str(&value.to_string());
                    jsonl.push('\n');
                }
            }
            run.write(&out, &jsonl)?;
            run.finish(&out)
        }
        Command::MatchViolence { corpus, classes, rules, out, norm } => {
            let mut run = Run::new("match-violence");
            let norm = read_norm(&mut run, &norm)?;
            let classes = match classes {
                Some(path) => {
                    let text = run.read(&path)?;
                    ClassSet::parse(&text).with_context(|| format!("parsing {}", path.display()))?
                }
                None => ClassSet::default_classes(),
            };
            let rules = match rules {
                Some(path) => {
                    let text = run.read(&path)?;
                    PatternRule::parse_all(&text).with_context(|| format!("parsing {}", path.display()))?
                }
                None => PatternRule::default_rules(),
            };
            let matcher = ViolenceMatcher::compile(&rules, &classes, &ExpansionTable::default())?;
            let docs = read_corpus(&mut run, &corpus)?;
            let mut tsv = String::from("doc_id\trule\tstart\tend\tspan\n");
            let mut n_docs = 0;
            for doc in &docs {
                let matches = matcher.match_text(&doc.text, &norm);
                if !matches.is_empty() {
                    n_docs += 1;
                }
                let tokens = tokenize(&normalize(&doc.text, &norm));
                for m in matches {
                    let span = tokens[m.start..m.end].join(" ");
                    let _ = writeln!(tsv, "{}\t{}\t{}\t{}\t{}", escape(&doc.id), m.rule, m.start, m.end, span);
                }
            }
            eprintln!("{n_docs} of {} documents matched", docs.len());
            run.write(&out, &tsv)?;
            run.finish(&out)
        }
        Command::Aggregate { judgments, out, queue, overrides, answers, threshold } => {
            aggregate_cmd(&judgments, &out, queue.as_deref(), overrides.as_deref(), answers.as_deref(), threshold)
        }
        Command::Kappa { judgments, job, min_shared, out } => {
            let mut run = Run::new("kappa");
            run.setting("job", &job);
            run.setting("min_shared", min_shared);
            let js = read_judgments(&mut run, &judgments)?;
            let result = avg_pairwise_kappa(&js, &job, min_shared)?;
            println!("{}", result.mean);
            if let Some(out) = out {
                let mut tsv = String::from("annotator_a\tannotator_b\tshared\tkappa\n");
                for p in &result.pairs {
                    let kappa = p.kappa.map_or("NA".to_owned(), |k| k.to_string());
                    let _ = writeln!(tsv, "{}\t{}\t{}\t{kappa}", escape(&p.a), escape(&p.b), p.shared);
                }
                let _ = writeln!(tsv, "# mean\t{}", result.mean);
                run.write(&out, &tsv)?;
                run.finish(&out)?;
            }
            Ok(())
        }
        Command::Gate { judgments, answers, threshold, out } => {
            let mut run = Run::new("gate");
            run.setting("threshold", threshold);
            let js = read_judgments(&mut run, &judgments)?;
            let gate = read_gate(&mut run, &answers, threshold)?;
            let mut tsv = String::from("annotator_id\tn_test\taccuracy\tpassed\n");
            for (annotator, result) in gate_all(&js, &gate) {
                match result {
                    Ok(r) => {
                        let _ = writeln!(tsv, "{}\t{}\t{}\t{}", escape(&annotator), r.n_test, r.accuracy, r.passed as u8);
                    }
                    Err(_) => {
                        let _ = writeln!(tsv, "{}\t0\tNA\t0", escape(&annotator));
                    }
                }
            }
            match out {
                Some(out) => {
                    run.write(&out, &tsv)?;
                    run.finish(&out)
                }
                None => {
                    print!("{tsv}");
                    Ok(())
                }
            }
        }
        Command::Train {
            corpus,
            labels,
            split,
            part,
            class,
            features,
            char_range,
            word_range,
            c,
            max_epochs,
            seed,
            out,
            trace,
            norm,
        } => {
            if !(c > 0.0 && c.is_finite()) {
                return Err(usage("--c must be a positive number"));
            }
            let mut run = Run::new("train");
            run.seed(seed);
            run.setting("class", class.as_str());
            run.setting("features", features);
            run.setting("char_range", format!("{},{}", char_range.0, char_range.1));
            run.setting("word_range", format!("{},{}", word_range.0, word_range.1));
            run.setting("c", c);
            run.setting("max_epochs", max_epochs);
            let norm = read_norm(&mut run, &norm)?;
            let docs = read_corpus(&mut run, &corpus)?;
            let labels = read_labels(&mut run, &labels)?;
            let docs = match split {
                Some(path) => {
                    run.setting("part", format!("{part:?}").to_lowercase());
                    select_part(&docs, &read_split(&mut run, &path)?, part)
                }
                None => docs.iter().collect(),
            };
            let by_id: HashMap<&str, &LabelRecord> = labels.iter().map(|l| (l.doc_id.as_str(), l)).collect();
            let mut texts = Vec::with_capacity(docs.len());
            let mut y = Vec::with_capacity(docs.len());
            for doc in docs {
                let label = by_id
                    .get(doc.id.as_str())
                    .with_context(|| format!("document {} has no label", doc.id))?;
                texts.push(doc.text.as_str());
                y.push(class.contains(label));
            }
            let features = FeatureConfig { mode: features, char_range, word_range, norm };
            let training = TrainConfig { c, seed, max_epochs, ..TrainConfig::default() };
            let (clf, tr) = TextClassifier::fit(&texts, &y, &features, &training)?;
            eprintln!(
                "trained on {} documents, {} features, {} epochs, objective {}",
                texts.len(),
                clf.space.dim(),
                clf.model.epochs,
                clf.model.objective_value
            );
            run.write(&out, &clf.to_text())?;
            if let Some(trace_path) = trace {
                let mut tsv = String::from("epoch\tdual_objective\tkkt_gap\tduality_gap\n");
                for (i, ((d, k), g)) in tr.dual_objective.iter().zip(&tr.kkt_gap).zip(&tr.duality_gap).enumerate() {
                    let _ = writeln!(tsv, "{}\t{d}\t{k}\t{g}", i + 1);
                }
                run.write(&trace_path, &tsv)?;
            }
            run.finish(&out)
        }
        Command::Predict { model, corpus, split, part, out } => {
            let mut run = Run::new("predict");
            let clf = read_model(&mut run, &model)?;
            let docs = read_corpus(&mut run, &corpus)?;
            let docs = match split {
                Some(path) => {
                    run.setting("part", format!("{part:?}").to_lowercase());
                    select_part(&docs, &read_split(&mut run, &path)?, part)
                }
                None => docs.iter().collect(),
            };
            let mut preds = Vec::with_capacity(docs.len());
            for doc in docs {
                let (label, score) = clf.predict(&doc.text)?;
                preds.push(Prediction { doc_id: doc.id.clone(), label, score });
            }
            run.write(&out, &predictions_to_tsv(&preds))?;
            run.finish(&out)
        }
        Command::Evaluate { labels, predictions, class, out } => {
            let mut run = Run::new("evaluate");
            run.setting("class", class.as_str());
            let labels = read_labels(&mut run, &labels)?;
            let text = run.read(&predictions)?;
            let preds = parse_predictions(&text).with_context(|| format!("parsing {}", predictions.display()))?;
            let gold: HashMap<String, bool> =
                labels.iter().map(|l| (l.doc_id.clone(), class.contains(l))).collect();
            let report = evaluate_predictions(&gold, &preds)?;
            println!("macro_f1\t{}", report.macro_f1);
            run.write(&out, &report.to_tsv())?;
            run.finish(&out)
        }
        Command::Explain {
            model,
            input,
            doc_id,
            text,
            seeds,
            samples,
            kernel_width,
            ridge,
            top_k,
            seed,
            out,
        } => {
            let mut run = Run::new("explain");
            run.seed(seed);
            run.setting("samples", samples);
            run.setting("kernel_width", kernel_width);
            run.setting("ridge", ridge);
            run.setting("top_k", top_k);
            let cfg = ExplainConfig { n_samples: samples, kernel_width, ridge, top_k, seed };
            if samples < 2 || !(kernel_width > 0.0) || !(ridge >= 0.0) {
                return Err(usage("explain needs --samples >= 2, --kernel-width > 0 and --ridge >= 0"));
            }
            let clf = read_model(&mut run, &model)?;
            let inv = read_seeds(&mut run, seeds.as_deref())?;
            let text = match (input, doc_id, text) {
                (Some(input), Some(id), None) => {
                    let docs = read_corpus(&mut run, &CorpusIn { input, format: None })?;
                    run.setting("doc_id", &id);
                    docs.into_iter()
                        .find(|d| d.id == id)
                        .with_context(|| format!("document {id} is not in the corpus"))?
                        .text
                }
                (None, None, Some(text)) => {
                    run.setting("text", &text);
                    text
                }
                _ => return Err(usage("give either --text or --in with --doc-id")),
            };
            let e = explain(&clf.model, &clf.space, &text, &inv, &cfg)?;
            run.write(&out, &e.to_tsv())?;
            run.finish(&out)
        }
        Command::Report { labels, emoji_stats, lexicon, metrics, top, out } => {
            let mut run = Run::new("report");
            run.setting("top", top);
            let records = read_labels(&mut run, &labels)?;
            let mut text = String::from("offanchor report\n\n");
            text.push_str(&class_distribution(&records));
            for (title, path, limit) in [
                ("emoji stats", emoji_stats, Some(top)),
                ("lexicon head", lexicon, Some(top)),
                ("evaluation", metrics, None),
            ] {
                if let Some(path) = path {
                    let table = run.read(&path)?;
                    text.push('\n');
                    text.push_str(&table_section(title, &path, &table, limit));
                }
            }
            run.write(&out, &text)?;
            run.finish(&out)
        }
        Command::Synth { kind, n, seed, out, labels_out } => {
            let mut run = Run::new("synth");
            run.seed(seed);
            run.setting("kind", &kind);
            let corpus = match kind.as_str() {
                "enrichment" => {
                    let cfg = EnrichmentConfig { n_docs: n.unwrap_or(10_000), ..EnrichmentConfig::default() };
                    run.setting("n", cfg.n_docs);
                    enrichment_corpus(&cfg, seed).map_err(|e| usage(e.to_string()))?
                }
                "separable" => {
                    run.setting("n", n.unwrap_or(200));
                    separable_corpus(n.unwrap_or(200), seed)?
                }
                "pipeline" => {
                    run.setting("n", n.unwrap_or(3000));
                    pipeline_corpus(n.unwrap_or(3000), seed)?
                }
                other => bail!(usage(format!("unknown corpus kind {other:?}"))),
            };
            run.write(&out, &corpus_to_jsonl(&corpus.docs))?;
            run.write(&labels_out, &labels_to_tsv(&corpus.labels))?;
            run.finish(&out)
        }
    }
}

fn collect(corpus: &CorpusIn, seeds: Option<&Path>, out: &Path) -> Result<()> {
    let mut run = Run::new("collect");
    let inv = read_seeds(&mut run, seeds)?;
    let docs = read_corpus(&mut run, corpus)?;
    let kept = filter_by_seeds(&docs, &inv)?;
    eprintln!("kept {} of {} documents", kept.len(), docs.len());
    run.write(out, &corpus_to_jsonl(&kept))?;
    run.finish(out)
}

fn dedup_cmd(
    corpus: &CorpusIn,
    out: &Path,
    dropped: Option<&Path>,
    policy: &NearDupPolicy,
    norm: &NormArgs,
) -> Result<()> {
    let mut run = Run::new("dedup");
    run.setting("shingle_size", policy.shingle_size);
    run.setting("jaccard_threshold", policy.jaccard_threshold);
    run.setting("min_tokens", policy.min_tokens);
    let norm = read_norm(&mut run, norm)?;
    let docs = read_corpus(&mut run, corpus)?;
    let outcome = dedup(&docs, policy, &norm)?;
    eprintln!("kept {} of {} documents", outcome.kept.len(), docs.len());
    run.write(out, &corpus_to_jsonl(&outcome.kept))?;
    if let Some(path) = dropped {
        let mut tsv = String::from("doc_id\treason\n");
        for (id, reason) in &outcome.dropped {
            let _ = writeln!(tsv, "{}\t{}", escape(id), reason.as_str());
        }
        run.write(path, &tsv)?;
    }
    run.finish(out)
}

fn normalize_cmd(corpus: &CorpusIn, out: &Path, norm: &NormArgs) -> Result<()> {
    let mut run = Run::new("normalize");
    let norm = read_norm(&mut run, norm)?;
    let docs = read_corpus(&mut run, corpus)?;
    let normalized: Vec<Document> = docs
        .into_iter()
        .map(|mut d| {
            d.text = normalize(&d.text, &norm);
            d
        })
        .collect();
    run.write(out, &corpus_to_jsonl(&normalized))?;
    run.finish(out)
}

fn aggregate_cmd(
    judgments: &Path,
    out: &Path,
    queue: Option<&Path>,
    overrides: Option<&Path>,
    answers: Option<&Path>,
    threshold: f64,
) -> Result<()> {
    let mut run = Run::new("aggregate");
    let mut js = read_judgments(&mut run, judgments)?;
    if let Some(answers) = answers {
        run.setting("threshold", threshold);
        let gate = read_gate(&mut run, answers, threshold)?;
        let failed: HashSet<String> = gate_all(&js, &gate)
            .into_iter()
            .filter(|(_, r)| !matches!(r, Ok(g) if g.passed))
            .map(|(a, _)| a)
            .collect();
        let before = js.len();
        js.retain(|j| !failed.contains(&j.annotator_id) && !gate.test_answers.contains_key(&j.doc_id));
        eprintln!(
            "gate dropped {} annotators and {} judgments",
            failed.len(),
            before - js.len()
        );
    }
    let mut aggregated = aggregate(&js);
    for (agreement, share) in agreement_fractions(&aggregated) {
        eprintln!("{}\t{share:.4}", agreement.as_str());
    }
    if let Some(queue) = queue {
        run.write(queue, &adjudication_to_tsv(&adjudication_queue(&aggregated)))?;
    }
    if let Some(path) = overrides {
        let text = run.read(path)?;
        let table = parse_overrides(&text).with_context(|| format!("parsing {}", path.display()))?;
        let changed = apply_overrides(&mut aggregated, &table)?;
        eprintln!("{changed} labels changed by overrides");
    }
    let labels = assemble_labels(&aggregated)?;
    run.write(out, &labels_to_tsv(&labels))?;
    run.finish(out)
}

fn class_distribution(labels: &[LabelRecord]) -> String {
    let n = labels.len();
    let mut rows: Vec<(String, usize)> = vec![
        ("offensive".into(), labels.iter().filter(|l| l.offensive).count()),
        ("clean".into(), labels.iter().filter(|l| !l.offensive).count()),
        ("hate".into(), labels.iter().filter(|l| l.is_hate()).count()),
    ];
    let mut targets: BTreeMap<String, usize> = BTreeMap::new();
    for l in labels {
        for t in &l.hate_targets {
            *targets.entry(t.to_string()).or_default() += 1;
        }
    }
    rows.extend(targets.into_iter().map(|(t, c)| (format!("hate:{t}"), c)));
    rows.push(("vulgar".into(), labels.iter().filter(|l| l.vulgar).count()));
    rows.push(("violence".into(), labels.iter().filter(|l| l.violence).count()));
    let mut out = format!("class distribution ({n} documents)\nclass\tcount\tpercent\n");
    for (name, count) in rows {
        let pct = if n == 0 { 0.0 } else { 100.0 * count as f64 / n as f64 };
        let _ = writeln!(out, "{name}\t{count}\t{pct:.2}");
    }
    out
}

/// Copies the header and the first `limit` rows of a TSV verbatim.
fn table_section(title: &str, path: &Path, table: &str, limit: Option<usize>) -> String {
    let lines: Vec<&str> = table.lines().filter(|l| !l.trim().is_empty()).collect();
    let (header, rows) = lines.split_first().map_or(("", &[][..]), |(h, r)| (*h, r));
    let shown = limit.map_or(rows.len(), |k| k.min(rows.len()));
    let mut out = format!("{title} ({shown} of {} rows from {})\n", rows.len(), path.display());
    out.push_str(header);
    out.push('\n');
    for row in &rows[..shown] {
        out.push_str(row);
        out.push('\n');
    }
    out
}

fn select_part<'a>(docs: &'a [Document], split: &DatasetSplit, part: offanchor::corpus::SplitPart) -> Vec<&'a Document> {
    let ids: HashSet<&str> = split.part(part).iter().map(String::as_str).collect();
    docs.iter().filter(|d| ids.contains(d.id.as_str())).collect()
}

fn read_corpus(run: &mut Run, corpus: &CorpusIn) -> Result<Vec<Document>> {
    let text = run.read(&corpus.input)?;
    let format = corpus.format.unwrap_or_else(|| CorpusFormat::from_path(&corpus.input));
    parse_corpus(&text, format).with_context(|| format!("parsing {}", corpus.input.display()))
}

fn read_labels(run: &mut Run, path: &Path) -> Result<Vec<LabelRecord>> {
    let text = run.read(path)?;
    parse_labels(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_split(run: &mut Run, path: &Path) -> Result<DatasetSplit> {
    let text = run.read(path)?;
    DatasetSplit::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_judgments(run: &mut Run, path: &Path) -> Result<Vec<Judgment>> {
    let text = run.read(path)?;
    parse_judgments(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_gate(run: &mut Run, path: &Path, threshold: f64) -> Result<QcGate> {
    let text = run.read(path)?;
    let answers = QcGate::parse_answers(&text).with_context(|| format!("parsing {}", path.display()))?;
    QcGate::new(answers, threshold).map_err(|e| usage(format!("--threshold: {e}")))
}

fn read_model(run: &mut Run, path: &Path) -> Result<TextClassifier> {
    let text = run.read(path)?;
    TextClassifier::parse(&text).with_context(|| format!("parsing model {}", path.display()))
}

fn read_seeds(run: &mut Run, path: Option<&Path>) -> Result<SeedInventory> {
    match path {
        Some(path) => {
            let text = run.read(path)?;
            SeedInventory::parse(&text).with_context(|| format!("parsing {}", path.display()))
        }
        None => {
            run.setting("seeds", "bundled");
            Ok(SeedInventory::default_seeds())
        }
    }
}

/// Defaults, then the config file, then `--set` overrides.
fn read_norm(run: &mut Run, args: &NormArgs) -> Result<NormalizationConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = run.read(path)?;
            NormalizationConfig::from_kv_text(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => NormalizationConfig::default(),
    };
    for assignment in &args.set {
        cfg.set(assignment, 0).map_err(|e| usage(format!("--set {assignment}: {e}")))?;
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    for kv in cfg.to_kv_text().lines() {
        if let Some((k, v)) = kv.split_once('=') {
            run.setting(&format!("norm.{}", k.trim()), v.trim());
        }
    }
    Ok(cfg)
}
