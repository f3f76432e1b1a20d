//! Multi-annotator judgments: gating, aggregation, agreement and adjudication.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};

use crate::corpus::{parse_targets, LabelRecord};
use crate::tsv::{self, content_lines};
use crate::{Error, Result};

pub const JOB_OFFENSIVE: &str = "offensive";
pub const JOB_HATE: &str = "hate";
pub const JOB_VULGAR: &str = "vulgar";
pub const JOB_VIOLENCE: &str = "violence";

/// One annotator's answer for one document in one job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub doc_id: String,
    pub annotator_id: String,
    pub job: String,
    pub label: String,
    pub timestamp: DateTime<Utc>,
}

pub const JUDGMENTS_HEADER: &str = "doc_id\tannotator_id\tjob\tlabel\ttimestamp";

pub fn parse_judgments(text: &str) -> Result<Vec<Judgment>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut header_seen = false;
    for (line, raw) in content_lines(text) {
        if !header_seen {
            header_seen = true;
            if raw.trim_end() == JUDGMENTS_HEADER {
                continue;
            }
            return Err(Error::parse(line, format!("expected header {JUDGMENTS_HEADER:?}")));
        }
        let cols: Vec<&str> = raw.split('\t').collect();
        if cols.len() != 5 {
            return Err(Error::parse(line, format!("expected 5 columns, found {}", cols.len())));
        }
        let timestamp = DateTime::parse_from_rfc3339(cols[4].trim())
            .map_err(|e| Error::parse(line, format!("bad timestamp: {e}")))?
            .with_timezone(&Utc);
        let j = Judgment {
            doc_id: tsv::unescape(cols[0]),
            annotator_id: cols[1].trim().to_owned(),
            job: cols[2].trim().to_owned(),
            label: cols[3].trim().to_owned(),
            timestamp,
        };
        if j.doc_id.is_empty() || j.annotator_id.is_empty() || j.job.is_empty() || j.label.is_empty() {
            return Err(Error::parse(line, "empty field"));
        }
        if !seen.insert((j.doc_id.clone(), j.annotator_id.clone(), j.job.clone())) {
            return Err(Error::parse(
                line,
                format!(
                    "second judgment by {} on {} for job {}",
                    j.annotator_id, j.doc_id, j.job
                ),
            ));
        }
        out.push(j);
    }
    Ok(out)
}

pub fn load_judgments(path: &Path) -> Result<Vec<Judgment>> {
    parse_judgments(&tsv::read_to_string(path)?)
}

pub fn judgments_to_tsv(judgments: &[Judgment]) -> String {
    let mut out = format!("{JUDGMENTS_HEADER}\n");
    for j in judgments {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            tsv::escape(&j.doc_id),
            j.annotator_id,
            j.job,
            j.label,
            j.timestamp.to_rfc3339_opts(SecondsFormat::Secs, true)
        ));
    }
    out
}

/// Hidden test questions with gold answers.
#[derive(Debug, Clone, PartialEq)]
pub struct QcGate {
    pub test_answers: BTreeMap<String, String>,
    pub pass_threshold: f64,
}

impl QcGate {
    pub fn new(test_answers: BTreeMap<String, String>, pass_threshold: f64) -> Result<Self> {
        if !(pass_threshold > 0.0 && pass_threshold <= 1.0) {
            return Err(Error::invalid(format!(
                "pass threshold must be in (0, 1], got {pass_threshold}"
            )));
        }
        Ok(QcGate { test_answers, pass_threshold })
    }

    /// Parses `doc_id<TAB>gold_label` lines.
    pub fn parse_answers(text: &str) -> Result<BTreeMap<String, String>> {
        let mut out = BTreeMap::new();
        for (line, raw) in content_lines(text) {
            let (id, label) = raw
                .split_once('\t')
                .ok_or_else(|| Error::parse(line, "expected doc_id<TAB>label"))?;
            if out.insert(tsv::unescape(id), label.trim().to_owned()).is_some() {
                return Err(Error::parse(line, format!("duplicate test question {id}")));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateResult {
    pub accuracy: f64,
    pub passed: bool,
    pub n_test: usize,
}

/// Scores one annotator's judgments on the gate's test documents; judgments
/// on other documents are ignored.
pub fn gate_annotator(judgments: &[Judgment], gate: &QcGate) -> Result<GateResult> {
    let (mut n, mut correct) = (0usize, 0usize);
    for j in judgments {
        if let Some(gold) = gate.test_answers.get(&j.doc_id) {
            n += 1;
            if *gold == j.label {
                correct += 1;
            }
        }
    }
    if n == 0 {
        return Err(Error::invalid("annotator judged no test question"));
    }
    let accuracy = correct as f64 / n as f64;
    Ok(GateResult {
        accuracy,
        passed: accuracy >= gate.pass_threshold,
        n_test: n,
    })
}

/// Gate results for every annotator appearing in `judgments`.
pub fn gate_all(judgments: &[Judgment], gate: &QcGate) -> BTreeMap<String, Result<GateResult>> {
    let mut by_annotator: BTreeMap<&str, Vec<Judgment>> = BTreeMap::new();
    for j in judgments {
        by_annotator.entry(&j.annotator_id).or_default().push(j.clone());
    }
    by_annotator
        .into_iter()
        .map(|(a, js)| (a.to_owned(), gate_annotator(&js, gate)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Agreement {
    Full,
    Majority,
    Tie,
}

impl Agreement {
    pub fn as_str(self) -> &'static str {
        match self {
            Agreement::Full => "full",
            Agreement::Majority => "majority",
            Agreement::Tie => "tie",
        }
    }
}

impl FromStr for Agreement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Agreement::Full),
            "majority" => Ok(Agreement::Majority),
            "tie" => Ok(Agreement::Tie),
            other => Err(Error::invalid(format!("unknown agreement {other:?}"))),
        }
    }
}

/// Modal label and how strongly annotators agreed on it. On a tie the
/// smallest tied label is reported; tied documents must be adjudicated.
pub fn majority_vote<S: AsRef<str>>(labels: &[S]) -> Result<(String, Agreement)> {
    if labels.is_empty() {
        return Err(Error::invalid("no judgments to vote on"));
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l.as_ref()).or_default() += 1;
    }
    let best = *counts.values().max().expect("non-empty");
    let modal: Vec<&str> = counts.iter().filter(|(_, &c)| c == best).map(|(l, _)| *l).collect();
    let agreement = if counts.len() == 1 {
        Agreement::Full
    } else if modal.len() == 1 {
        Agreement::Majority
    } else {
        Agreement::Tie
    };
    Ok((modal[0].to_owned(), agreement))
}

/// The voted label for one document in one job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregatedLabel {
    pub doc_id: String,
    pub job: String,
    pub label: String,
    pub agreement: Agreement,
    pub votes: BTreeMap<String, usize>,
}

impl AggregatedLabel {
    pub fn votes_text(&self) -> String {
        self.votes
            .iter()
            .map(|(l, c)| format!("{l}:{c}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Votes every `(doc, job)`; output follows first appearance in `judgments`.
pub fn aggregate(judgments: &[Judgment]) -> Vec<AggregatedLabel> {
    let mut order: Vec<(&str, &str)> = Vec::new();
    let mut groups: HashMap<(&str, &str), Vec<&str>> = HashMap::new();
    for j in judgments {
        let key = (j.doc_id.as_str(), j.job.as_str());
        groups
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(j.label.as_str());
    }
    order
        .into_iter()
        .map(|key| {
            let labels = &groups[&key];
            let (label, agreement) = majority_vote(labels).expect("group is non-empty");
            let mut votes = BTreeMap::new();
            for l in labels {
                *votes.entry((*l).to_owned()).or_default() += 1;
            }
            AggregatedLabel {
                doc_id: key.0.to_owned(),
                job: key.1.to_owned(),
                label,
                agreement,
                votes,
            }
        })
        .collect()
}

/// Fractions of full, majority and tie outcomes.
pub fn agreement_fractions(aggregated: &[AggregatedLabel]) -> BTreeMap<Agreement, f64> {
    let mut out: BTreeMap<Agreement, f64> = [Agreement::Full, Agreement::Majority, Agreement::Tie]
        .into_iter()
        .map(|a| (a, 0.0))
        .collect();
    if aggregated.is_empty() {
        return out;
    }
    let mut counts: BTreeMap<Agreement, usize> = BTreeMap::new();
    for a in aggregated {
        *counts.entry(a.agreement).or_default() += 1;
    }
    for (a, c) in counts {
        out.insert(a, c as f64 / aggregated.len() as f64);
    }
    out
}

/// Cohen's kappa between two aligned label sequences.
pub fn cohen_kappa<S: AsRef<str>>(a: &[S], b: &[S]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::invalid("kappa needs at least 2 aligned labels"));
    }
    let n = a.len() as f64;
    let mut ca: BTreeMap<&str, usize> = BTreeMap::new();
    let mut cb: BTreeMap<&str, usize> = BTreeMap::new();
    let mut agree = 0usize;
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (x.as_ref(), y.as_ref());
        *ca.entry(x).or_default() += 1;
        *cb.entry(y).or_default() += 1;
        if x == y {
            agree += 1;
        }
    }
    let labels: BTreeSet<&str> = ca.keys().chain(cb.keys()).copied().collect();
    // marginal products summed in integers so p_e is symmetric bit for bit
    let pe_num: u128 = labels
        .iter()
        .map(|l| {
            let x = *ca.get(l).unwrap_or(&0) as u128;
            let y = *cb.get(l).unwrap_or(&0) as u128;
            x * y
        })
        .sum();
    let pe = pe_num as f64 / (n * n);
    let po = agree as f64 / n;
    if pe_num == (a.len() as u128) * (a.len() as u128) {
        return Err(Error::Undefined("kappa undefined: chance agreement is 1".into()));
    }
    Ok((po - pe) / (1.0 - pe))
}

/// Kappa for one annotator pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairKappa {
    pub a: String,
    pub b: String,
    pub shared: usize,
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseKappa {
    pub mean: f64,
    pub pairs: Vec<PairKappa>,
}

pub const DEFAULT_MIN_SHARED: usize = 20;

/// Unweighted mean of Cohen's kappa over annotator pairs sharing at least
/// `min_shared` documents in `job`. Pairs whose kappa is undefined are listed
/// with `kappa: None` and left out of the mean.
pub fn avg_pairwise_kappa(judgments: &[Judgment], job: &str, min_shared: usize) -> Result<PairwiseKappa> {
    let mut by_annotator: BTreeMap<&str, BTreeMap<&str, &str>> = BTreeMap::new();
    for j in judgments.iter().filter(|j| j.job == job) {
        by_annotator
            .entry(&j.annotator_id)
            .or_default()
            .insert(&j.doc_id, &j.label);
    }
    let annotators: Vec<&str> = by_annotator.keys().copied().collect();
    let mut pairs = Vec::new();
    let mut defined = Vec::new();
    for (i, &x) in annotators.iter().enumerate() {
        for &y in &annotators[i + 1..] {
            let (lx, ly) = (&by_annotator[x], &by_annotator[y]);
            let (mut sa, mut sb) = (Vec::new(), Vec::new());
            for (doc, la) in lx {
                if let Some(lb) = ly.get(doc) {
                    sa.push(*la);
                    sb.push(*lb);
                }
            }
            if sa.len() < min_shared.max(2) {
                continue;
            }
            let kappa = cohen_kappa(&sa, &sb).ok();
            if let Some(k) = kappa {
                defined.push(k);
            }
            pairs.push(PairKappa {
                a: x.to_owned(),
                b: y.to_owned(),
                shared: sa.len(),
                kappa,
            });
        }
    }
    if defined.is_empty() {
        return Err(Error::Undefined(format!(
            "no annotator pair shares {min_shared} documents with a defined kappa in job {job:?}"
        )));
    }
    let mean = defined.iter().sum::<f64>() / defined.len() as f64;
    Ok(PairwiseKappa { mean, pairs })
}

/// Documents lacking unanimous agreement, in input order.
pub fn adjudication_queue(aggregated: &[AggregatedLabel]) -> Vec<&AggregatedLabel> {
    aggregated.iter().filter(|a| a.agreement != Agreement::Full).collect()
}

pub const ADJUDICATION_HEADER: &str = "doc_id\tjob\tlabel\tagreement\tvotes\toverride";

pub fn adjudication_to_tsv(queue: &[&AggregatedLabel]) -> String {
    let mut out = format!("{ADJUDICATION_HEADER}\n");
    for a in queue {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t\n",
            tsv::escape(&a.doc_id),
            a.job,
            a.label,
            a.agreement.as_str(),
            a.votes_text()
        ));
    }
    out
}

/// Reads a filled-in adjudication sheet; rows with an empty override are
/// skipped.
pub fn parse_overrides(text: &str) -> Result<BTreeMap<(String, String), String>> {
    let mut out = BTreeMap::new();
    let mut header_seen = false;
    for (line, raw) in content_lines(text) {
        if !header_seen {
            header_seen = true;
            if raw.trim_end() == ADJUDICATION_HEADER {
                continue;
            }
            return Err(Error::parse(line, format!("expected header {ADJUDICATION_HEADER:?}")));
        }
        let cols: Vec<&str> = raw.split('\t').collect();
        if cols.len() < 5 || cols.len() > 6 {
            return Err(Error::parse(line, format!("expected 6 columns, found {}", cols.len())));
        }
        let value = cols.get(5).map(|s| s.trim()).unwrap_or("");
        if value.is_empty() {
            continue;
        }
        let key = (tsv::unescape(cols[0]), cols[1].trim().to_owned());
        if out.insert(key, value.to_owned()).is_some() {
            return Err(Error::parse(line, format!("duplicate row for {}", cols[0])));
        }
    }
    Ok(out)
}

/// Replaces voted labels by expert decisions. Returns how many labels changed.
pub fn apply_overrides(
    aggregated: &mut [AggregatedLabel],
    overrides: &BTreeMap<(String, String), String>,
) -> Result<usize> {
    let index: HashMap<(&str, &str), usize> = aggregated
        .iter()
        .enumerate()
        .map(|(i, a)| ((a.doc_id.as_str(), a.job.as_str()), i))
        .collect();
    let mut targets = Vec::with_capacity(overrides.len());
    for (doc, job) in overrides.keys() {
        let i = index.get(&(doc.as_str(), job.as_str())).ok_or_else(|| {
            Error::invalid(format!("override for unknown document {doc} in job {job}"))
        })?;
        targets.push(*i);
    }
    let mut changed = 0;
    for (i, value) in targets.into_iter().zip(overrides.values()) {
        if aggregated[i].label != *value {
            aggregated[i].label = value.clone();
            changed += 1;
        }
    }
    Ok(changed)
}

fn parse_flag(value: &str, doc: &str, job: &str) -> Result<bool> {
    match value {
        "1" | "true" | "yes" => Ok(true),
        "0" | "false" | "no" => Ok(false),
        other => Err(Error::invalid(format!(
            "label {other:?} for {doc} in job {job} is not binary"
        ))),
    }
}

/// Builds one label record per document carrying an offensive decision.
/// Secondary layers are dropped for documents voted clean.
pub fn assemble_labels(aggregated: &[AggregatedLabel]) -> Result<Vec<LabelRecord>> {
    let mut order: Vec<&str> = Vec::new();
    let mut by_doc: HashMap<&str, HashMap<&str, &str>> = HashMap::new();
    for a in aggregated {
        by_doc
            .entry(&a.doc_id)
            .or_insert_with(|| {
                order.push(&a.doc_id);
                HashMap::new()
            })
            .insert(&a.job, &a.label);
    }
    let mut out = Vec::with_capacity(order.len());
    for doc in order {
        let jobs = &by_doc[doc];
        let offensive = jobs
            .get(JOB_OFFENSIVE)
            .ok_or_else(|| Error::MissingLabel(doc.to_owned()))?;
        let mut rec = LabelRecord::clean(doc);
        if parse_flag(offensive, doc, JOB_OFFENSIVE)? {
            rec.offensive = true;
            if let Some(h) = jobs.get(JOB_HATE) {
                rec.hate_targets = parse_targets(h)?;
            }
            if let Some(v) = jobs.get(JOB_VULGAR) {
                rec.vulgar = parse_flag(v, doc, JOB_VULGAR)?;
            }
            if let Some(v) = jobs.get(JOB_VIOLENCE) {
                rec.violence = parse_flag(v, doc, JOB_VIOLENCE)?;
            }
        }
        rec.check_monotone()?;
        out.push(rec);
    }
    Ok(out)
}
