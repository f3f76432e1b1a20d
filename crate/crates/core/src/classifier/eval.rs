//! Binary evaluation with macro-averaged metrics.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::tsv::{self, content_lines, parse_bool01};
use crate::{Error, Result};

/// Precision, recall and F1 of one class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    /// Index 0 is the negative class, 1 the positive one.
    pub per_class: [ClassMetrics; 2],
    /// `confusion[gold][pred]`.
    pub confusion: [[usize; 2]; 2],
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores predictions against gold labels.
pub fn evaluate(gold: &[bool], pred: &[bool]) -> Result<EvalReport> {
    if gold.len() != pred.len() {
        return Err(Error::DimensionMismatch { expected: gold.len(), found: pred.len() });
    }
    if gold.is_empty() {
        return Err(Error::invalid("nothing to evaluate"));
    }
    let mut confusion = [[0usize; 2]; 2];
    for (&g, &p) in gold.iter().zip(pred) {
        confusion[g as usize][p as usize] += 1;
    }
    let per_class = [0usize, 1].map(|k| {
        let tp = confusion[k][k];
        let predicted = confusion[0][k] + confusion[1][k];
        let support = confusion[k][0] + confusion[k][1];
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ClassMetrics { precision, recall, f1, support }
    });
    let mean = |f: fn(&ClassMetrics) -> f64| (f(&per_class[0]) + f(&per_class[1])) / 2.0;
    Ok(EvalReport {
        accuracy: ratio(confusion[0][0] + confusion[1][1], gold.len()),
        macro_precision: mean(|m| m.precision),
        macro_recall: mean(|m| m.recall),
        macro_f1: mean(|m| m.f1),
        per_class,
        confusion,
    })
}

impl EvalReport {
    /// `metric<TAB>value` lines with full float precision.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("metric\tvalue\n");
        let mut row = |k: &str, v: String| {
            let _ = writeln!(out, "{k}\t{v}");
        };
        row("accuracy", self.accuracy.to_string());
        row("macro_precision", self.macro_precision.to_string());
        row("macro_recall", self.macro_recall.to_string());
        row("macro_f1", self.macro_f1.to_string());
        for (k, m) in self.per_class.iter().enumerate() {
            row(&format!("precision_{k}"), m.precision.to_string());
            row(&format!("recall_{k}"), m.recall.to_string());
            row(&format!("f1_{k}"), m.f1.to_string());
            row(&format!("support_{k}"), m.support.to_string());
        }
        for g in 0..2 {
            for p in 0..2 {
                row(&format!("confusion_{g}{p}"), self.confusion[g][p].to_string());
            }
        }
        out
    }
}

/// A predicted label with its score.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub doc_id: String,
    pub label: bool,
    pub score: f64,
}

pub const PREDICTIONS_HEADER: &str = "doc_id\tlabel\tscore";

pub fn predictions_to_tsv(preds: &[Prediction]) -> String {
    let mut out = format!("{PREDICTIONS_HEADER}\n");
    for p in preds {
        let _ = writeln!(out, "{}\t{}\t{}", tsv::escape(&p.doc_id), p.label as u8, p.score);
    }
    out
}

/// Reads `doc_id, label, score`; the score column is optional so that
/// outputs of other systems can be scored too.
pub fn parse_predictions(text: &str) -> Result<Vec<Prediction>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, (line, raw)) in content_lines(text).enumerate() {
        if i == 0 && raw.starts_with("doc_id\t") {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').collect();
        if cols.len() < 2 || cols.len() > 3 {
            return Err(Error::parse(line, "expected doc_id<TAB>label[<TAB>score]"));
        }
        let doc_id = tsv::unescape(cols[0]);
        if !seen.insert(doc_id.clone()) {
            return Err(Error::parse(line, format!("duplicate prediction for {doc_id}")));
        }
        let label = parse_bool01(cols[1], line, "label")?;
        let score = match cols.get(2) {
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::parse(line, format!("bad score {s:?}")))?,
            None => f64::NAN,
        };
        out.push(Prediction { doc_id, label, score });
    }
    Ok(out)
}

pub fn load_predictions(path: &Path) -> Result<Vec<Prediction>> {
    parse_predictions(&tsv::read_to_string(path)?)
}

/// Scores a predictions list against gold labels keyed by document id.
/// Every prediction needs a gold label; gold labels of documents that were
/// not predicted are ignored.
pub fn evaluate_predictions(gold: &HashMap<String, bool>, preds: &[Prediction]) -> Result<EvalReport> {
    let mut g = Vec::with_capacity(preds.len());
    let mut p = Vec::with_capacity(preds.len());
    for pr in preds {
        let label = gold.get(&pr.doc_id).ok_or_else(|| Error::MissingLabel(pr.doc_id.clone()))?;
        g.push(*label);
        p.push(pr.label);
    }
    evaluate(&g, &p)
}
