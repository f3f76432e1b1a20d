//! Documents, layered labels and dataset split bookkeeping.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use crate::tsv::{self, parse_bool01};
use crate::{Error, Result};

/// One social-media text item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub created_at: DateTime<Utc>,
    /// Informational language tag.
    pub lang: Option<String>,
}

impl Document {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        created_at: DateTime<Utc>,
    ) -> Result<Self> {
        let doc = Document {
            id: id.into(),
            text: text.into(),
            created_at,
            lang: None,
        };
        doc.validate()?;
        Ok(doc)
    }

    pub fn with_lang(mut self, lang: impl Into<String>) -> Self {
        self.lang = Some(lang.into());
        self
    }

    fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::invalid("document id is empty"));
        }
        if self.text.contains('\0') {
            return Err(Error::invalid(format!(
                "document {:?} contains a NUL character",
                self.id
            )));
        }
        Ok(())
    }

    /// Serializes the document as one JSONL object (no trailing newline).
    pub fn to_json_line(&self) -> String {
        let mut obj = Map::new();
        obj.insert("id".into(), Value::String(self.id.clone()));
        obj.insert("text".into(), Value::String(self.text.clone()));
        obj.insert(
            "created_at".into(),
            Value::String(
                self.created_at
                    .to_rfc3339_opts(SecondsFormat::Secs, true),
            ),
        );
        if let Some(lang) = &self.lang {
            obj.insert("lang".into(), Value::String(lang.clone()));
        }
        Value::Object(obj).to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    Tsv,
}

impl CorpusFormat {
    /// Guesses the format from a file extension, defaulting to JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv") => CorpusFormat::Tsv,
            _ => CorpusFormat::Jsonl,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "tsv" => Ok(CorpusFormat::Tsv),
            other => Err(Error::invalid(format!("unknown corpus format {other:?}"))),
        }
    }
}

/// Reads a corpus file. Documents are returned in file order.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Vec<Document>> {
    let text = tsv::read_to_string(path)?;
    parse_corpus(&text, format)
}

pub fn parse_corpus(text: &str, format: CorpusFormat) -> Result<Vec<Document>> {
    let docs = match format {
        CorpusFormat::Jsonl => parse_jsonl(text)?,
        CorpusFormat::Tsv => parse_tsv(text)?,
    };
    let mut seen = HashSet::with_capacity(docs.len());
    for (_, doc) in &docs {
        if !seen.insert(doc.id.as_str()) {
            return Err(Error::DuplicateId(doc.id.clone()));
        }
    }
    Ok(docs.into_iter().map(|(_, d)| d).collect())
}

fn parse_timestamp(raw: &str, line: usize) -> Result<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(raw)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| Error::parse(line, format!("field created_at: {e}")))
}

fn string_field<'a>(obj: &'a Map<String, Value>, key: &str, line: usize) -> Result<&'a str> {
    match obj.get(key) {
        None => Err(Error::parse(line, format!("missing field {key}"))),
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(Error::parse(line, format!("field {key} is not a string"))),
    }
}

fn parse_jsonl(text: &str) -> Result<Vec<(usize, Document)>> {
    let mut docs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: Value =
            serde_json::from_str(raw).map_err(|e| Error::parse(line, e.to_string()))?;
        let Value::Object(obj) = value else {
            return Err(Error::parse(line, "expected a JSON object"));
        };
        let id = string_field(&obj, "id", line)?;
        let text = string_field(&obj, "text", line)?;
        let created_at = parse_timestamp(string_field(&obj, "created_at", line)?, line)?;
        let lang = match obj.get("lang") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(Error::parse(line, "field lang is not a string")),
        };
        let doc = Document {
            id: id.to_owned(),
            text: text.to_owned(),
            created_at,
            lang,
        };
        doc.validate()
            .map_err(|e| Error::parse(line, e.to_string()))?;
        docs.push((line, doc));
    }
    Ok(docs)
}

fn parse_tsv(text: &str) -> Result<Vec<(usize, Document)>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let Some((_, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    let columns: Vec<&str> = header.split('\t').map(str::trim).collect();
    let col = |name: &str| columns.iter().position(|c| *c == name);
    let (Some(id_col), Some(text_col), Some(ts_col)) = (col("id"), col("text"), col("created_at"))
    else {
        return Err(Error::parse(
            1,
            "header must contain id, text and created_at columns",
        ));
    };
    let lang_col = col("lang");

    let mut docs = Vec::new();
    for (line, raw) in lines {
        let raw = raw.trim_end_matches('\r');
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        let get = |idx: usize, name: &str| {
            fields
                .get(idx)
                .copied()
                .ok_or_else(|| Error::parse(line, format!("missing field {name}")))
        };
        let doc = Document {
            id: get(id_col, "id")?.to_owned(),
            text: tsv::unescape(get(text_col, "text")?),
            created_at: parse_timestamp(get(ts_col, "created_at")?, line)?,
            lang: lang_col
                .and_then(|c| fields.get(c))
                .filter(|s| !s.is_empty())
                .map(|s| s.to_string()),
        };
        doc.validate()
            .map_err(|e| Error::parse(line, e.to_string()))?;
        docs.push((line, doc));
    }
    Ok(docs)
}

/// Writes documents as JSONL, one object per line.
pub fn corpus_to_jsonl(docs: &[Document]) -> String {
    let mut out = String::new();
    for d in docs {
        out.push_str(&d.to_json_line());
        out.push('\n');
    }
    out
}

/// Groups targeted by hate speech.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HateTarget {
    Gender,
    Race,
    Ideology,
    SocialClass,
    Religion,
    Disability,
}

impl HateTarget {
    pub const ALL: [HateTarget; 6] = [
        HateTarget::Gender,
        HateTarget::Race,
        HateTarget::Ideology,
        HateTarget::SocialClass,
        HateTarget::Religion,
        HateTarget::Disability,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HateTarget::Gender => "gender",
            HateTarget::Race => "race",
            HateTarget::Ideology => "ideology",
            HateTarget::SocialClass => "social_class",
            HateTarget::Religion => "religion",
            HateTarget::Disability => "disability",
        }
    }
}

impl fmt::Display for HateTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HateTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HateTarget::ALL
            .into_iter()
            .find(|t| t.as_str() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown hate target {s:?}")))
    }
}

/// Parses a comma-joined target list; empty, `none` and `not_hs` mean no target.
pub fn parse_targets(field: &str) -> Result<BTreeSet<HateTarget>> {
    let field = field.trim();
    if field.is_empty() || field.eq_ignore_ascii_case("none") || field.eq_ignore_ascii_case("not_hs")
    {
        return Ok(BTreeSet::new());
    }
    field.split(',').map(str::parse).collect()
}

pub fn format_targets(targets: &BTreeSet<HateTarget>) -> String {
    targets
        .iter()
        .map(|t| t.as_str())
        .collect::<Vec<_>>()
        .join(",")
}

/// Gold labels for one document. An empty `hate_targets` set means the
/// document is not hate speech.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRecord {
    pub doc_id: String,
    pub offensive: bool,
    pub hate_targets: BTreeSet<HateTarget>,
    pub vulgar: bool,
    pub violence: bool,
}

impl LabelRecord {
    pub fn new(
        doc_id: impl Into<String>,
        offensive: bool,
        hate_targets: BTreeSet<HateTarget>,
        vulgar: bool,
        violence: bool,
    ) -> Result<Self> {
        let rec = LabelRecord {
            doc_id: doc_id.into(),
            offensive,
            hate_targets,
            vulgar,
            violence,
        };
        rec.check_monotone()?;
        Ok(rec)
    }

    pub fn clean(doc_id: impl Into<String>) -> Self {
        LabelRecord {
            doc_id: doc_id.into(),
            offensive: false,
            hate_targets: BTreeSet::new(),
            vulgar: false,
            violence: false,
        }
    }

    pub fn offensive(doc_id: impl Into<String>) -> Self {
        LabelRecord {
            offensive: true,
            ..LabelRecord::clean(doc_id)
        }
    }

    pub fn is_hate(&self) -> bool {
        !self.hate_targets.is_empty()
    }

    /// Hate, vulgar and violence labels only exist on offensive documents.
    pub fn check_monotone(&self) -> Result<()> {
        if !self.offensive && (self.is_hate() || self.vulgar || self.violence) {
            return Err(Error::invalid(format!(
                "label for {:?} marks hate/vulgar/violence on a non-offensive document",
                self.doc_id
            )));
        }
        Ok(())
    }
}

pub const LABELS_HEADER: &str = "doc_id\toffensive\thate_targets\tvulgar\tviolence";

pub fn load_labels(path: &Path) -> Result<Vec<LabelRecord>> {
    parse_labels(&tsv::read_to_string(path)?)
}

pub fn parse_labels(text: &str) -> Result<Vec<LabelRecord>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r').split('\t').next() == Some("doc_id") => {}
        Some(_) => return Err(Error::parse(1, "labels file must start with a header row")),
        None => return Ok(Vec::new()),
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (line, raw) in lines {
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = raw.split('\t').collect();
        if f.len() < 5 {
            return Err(Error::parse(line, format!("expected 5 columns, got {}", f.len())));
        }
        let rec = LabelRecord {
            doc_id: f[0].to_owned(),
            offensive: parse_bool01(f[1], line, "offensive")?,
            hate_targets: parse_targets(f[2]).map_err(|e| Error::parse(line, e.to_string()))?,
            vulgar: parse_bool01(f[3], line, "vulgar")?,
            violence: parse_bool01(f[4], line, "violence")?,
        };
        rec.check_monotone()
            .map_err(|e| Error::parse(line, e.to_string()))?;
        if !seen.insert(rec.doc_id.clone()) {
            return Err(Error::DuplicateId(rec.doc_id));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn labels_to_tsv(labels: &[LabelRecord]) -> String {
    let mut out = String::from(LABELS_HEADER);
    out.push('\n');
    for l in labels {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            l.doc_id,
            u8::from(l.offensive),
            format_targets(&l.hate_targets),
            u8::from(l.vulgar),
            u8::from(l.violence)
        ));
    }
    out
}

/// Train / dev / test partition of a corpus, by document id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSplit {
    pub train: Vec<String>,
    pub dev: Vec<String>,
    pub test: Vec<String>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitPart {
    Train,
    Dev,
    Test,
}

impl FromStr for SplitPart {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(SplitPart::Train),
            "dev" => Ok(SplitPart::Dev),
            "test" => Ok(SplitPart::Test),
            other => Err(Error::invalid(format!("unknown split part {other:?}"))),
        }
    }
}

impl DatasetSplit {
    pub fn part(&self, part: SplitPart) -> &[String] {
        match part {
            SplitPart::Train => &self.train,
            SplitPart::Dev => &self.dev,
            SplitPart::Test => &self.test,
        }
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.dev.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Renders the split file: `train:`, `dev:` and `test:` section headers,
    /// each followed by one id per line. The seed is kept in a comment.
    pub fn to_text(&self) -> String {
        let mut out = format!("# seed={}\n", self.seed);
        for (name, ids) in [("train", &self.train), ("dev", &self.dev), ("test", &self.test)] {
            out.push_str(name);
            out.push_str(":\n");
            for id in ids {
                out.push_str(id);
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut split = DatasetSplit {
            train: Vec::new(),
            dev: Vec::new(),
            test: Vec::new(),
            seed: 0,
        };
        let mut current: Option<SplitPart> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim();
            if raw.is_empty() {
                continue;
            }
            if let Some(rest) = raw.strip_prefix('#') {
                if let Some(seed) = rest.trim().strip_prefix("seed=") {
                    split.seed = seed
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad seed {seed:?}")))?;
                }
                continue;
            }
            if let Some(name) = raw.strip_suffix(':') {
                current = Some(name.parse().map_err(|e: Error| Error::parse(line, e.to_string()))?);
                continue;
            }
            let part = current.ok_or_else(|| Error::parse(line, "id before any section header"))?;
            let ids = match part {
                SplitPart::Train => &mut split.train,
                SplitPart::Dev => &mut split.dev,
                SplitPart::Test => &mut split.test,
            };
            ids.push(raw.to_owned());
        }
        let mut seen = HashSet::new();
        for id in split.train.iter().chain(&split.dev).chain(&split.test) {
            if !seen.insert(id) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        Ok(split)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.70,
            dev: 0.10,
            test: 0.20,
        }
    }
}

impl SplitRatios {
    pub fn new(train: f64, dev: f64, test: f64) -> Result<Self> {
        let r = SplitRatios { train, dev, test };
        r.validate()?;
        Ok(r)
    }

    fn validate(&self) -> Result<()> {
        let parts = [self.train, self.dev, self.test];
        if parts.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::invalid("split ratios must be non-negative"));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("split ratios must sum to 1"));
        }
        Ok(())
    }
}

impl FromStr for SplitRatios {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::invalid(format!("bad ratios {s:?}")))?;
        match parts[..] {
            [a, b, c] => SplitRatios::new(a, b, c),
            _ => Err(Error::invalid("ratios need three comma-separated values")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub split: DatasetSplit,
    pub warnings: Vec<String>,
}

/// Classes smaller than this are not spread across splits.
const MIN_CLASS_FOR_SPLIT: usize = 3;

/// Stratified split on the offensive label.
///
/// Split sizes are `round(ratio * N)` for dev and test, train takes the
/// remainder. Within each split the number of positives is the rounded
/// proportional share, so per-class counts differ from the exact share by
/// less than one item. Classes with fewer than three members go entirely to
/// train and produce a warning.
pub fn stratified_split(
    labels: &[LabelRecord],
    ratios: SplitRatios,
    seed: u64,
) -> Result<SplitOutcome> {
    ratios.validate()?;
    if labels.is_empty() {
        return Err(Error::invalid("cannot split an empty corpus"));
    }
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.doc_id.as_str()) {
            return Err(Error::DuplicateId(l.doc_id.clone()));
        }
    }

    let n = labels.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positives: Vec<usize> = (0..n).filter(|&i| labels[i].offensive).collect();
    let mut negatives: Vec<usize> = (0..n).filter(|&i| !labels[i].offensive).collect();
    positives.shuffle(&mut rng);
    negatives.shuffle(&mut rng);

    let mut warnings = Vec::new();
    let mut spreadable = |class: &[usize], name: &str| {
        if !class.is_empty() && class.len() < MIN_CLASS_FOR_SPLIT {
            let msg = format!(
                "class {name} has only {} member(s); all assigned to train",
                class.len()
            );
            log::warn!("{msg}");
            warnings.push(msg);
            0
        } else {
            class.len()
        }
    };
    let pos_avail = spreadable(&positives, "offensive");
    let neg_avail = spreadable(&negatives, "not_offensive");

    let n_test = (ratios.test * n as f64).round() as usize;
    let n_dev = ((ratios.dev * n as f64).round() as usize).min(n - n_test.min(n));
    let n_test = n_test.min(n);
    let share = positives.len() as f64 / n as f64;

    let mut pos_left = pos_avail;
    let mut neg_left = neg_avail;
    let mut take = |size: usize| -> (usize, usize) {
        let want = (size as f64 * share).round() as usize;
        let lo = size.saturating_sub(neg_left);
        let hi = pos_left.min(size);
        let pos = want.clamp(lo.min(hi), hi);
        let neg = (size - pos).min(neg_left);
        pos_left -= pos;
        neg_left -= neg;
        (pos, neg)
    };
    let (pos_test, neg_test) = take(n_test);
    let (pos_dev, neg_dev) = take(n_dev);

    let mut assignment = vec![SplitPart::Train; n];
    for &i in &positives[..pos_test] {
        assignment[i] = SplitPart::Test;
    }
    for &i in &positives[pos_test..pos_test + pos_dev] {
        assignment[i] = SplitPart::Dev;
    }
    for &i in &negatives[..neg_test] {
        assignment[i] = SplitPart::Test;
    }
    for &i in &negatives[neg_test..neg_test + neg_dev] {
        assignment[i] = SplitPart::Dev;
    }

    let mut split = DatasetSplit {
        train: Vec::new(),
        dev: Vec::new(),
        test: Vec::new(),
        seed,
    };
    for (label, part) in labels.iter().zip(assignment) {
        let ids = match part {
            SplitPart::Train => &mut split.train,
            SplitPart::Dev => &mut split.dev,
            SplitPart::Test => &mut split.test,
        };
        ids.push(label.doc_id.clone());
    }
    Ok(SplitOutcome { split, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts() -> DateTime<Utc> {
        DateTime::parse_from_rfc3339("2017-01-01T00:00:00Z")
            .unwrap()
            .with_timezone(&Utc)
    }

    fn labels(n: usize, positives: usize) -> Vec<LabelRecord> {
        (0..n)
            .map(|i| {
                if i < positives {
                    LabelRecord::offensive(format!("d{i}"))
                } else {
                    LabelRecord::clean(format!("d{i}"))
                }
            })
            .collect()
    }

    fn count_pos(ids: &[String], labels: &[LabelRecord]) -> usize {
        let pos: HashSet<&str> = labels
            .iter()
            .filter(|l| l.offensive)
            .map(|l| l.doc_id.as_str())
            .collect();
        ids.iter().filter(|id| pos.contains(id.as_str())).count()
    }

    #[test]
    fn empty_jsonl_is_empty_corpus() {
        assert!(parse_corpus("", CorpusFormat::Jsonl).unwrap().is_empty());
    }

    #[test]
    fn jsonl_round_trip_preserves_order() {
        let docs = vec![
            Document::new("a", "يا كلب 🐷", ts()).unwrap(),
            Document::new("b", "hello", ts()).unwrap().with_lang("en"),
            Document::new("c", "line\nbreak", ts()).unwrap(),
        ];
        let text = corpus_to_jsonl(&docs);
        assert_eq!(parse_corpus(&text, CorpusFormat::Jsonl).unwrap(), docs);
    }

    #[test]
    fn missing_text_field_names_line() {
        let text = "{\"id\":\"a\",\"text\":\"x\",\"created_at\":\"2017-01-01T00:00:00Z\"}\n\
                    {\"id\":\"b\",\"created_at\":\"2017-01-01T00:00:00Z\"}\n";
        let err = parse_corpus(text, CorpusFormat::Jsonl).unwrap_err();
        assert_eq!(err.to_string(), "line 2: missing field text");
    }

    #[test]
    fn duplicate_id_rejected() {
        let line = "{\"id\":\"a\",\"text\":\"x\",\"created_at\":\"2017-01-01T00:00:00Z\"}\n";
        let err = parse_corpus(&line.repeat(2), CorpusFormat::Jsonl).unwrap_err();
        assert!(matches!(err, Error::DuplicateId(ref id) if id == "a"));
    }

    #[test]
    fn nul_text_rejected() {
        let text = "{\"id\":\"a\",\"text\":\"x\\u0000\",\"created_at\":\"2017-01-01T00:00:00Z\"}\n";
        assert!(parse_corpus(text, CorpusFormat::Jsonl).is_err());
    }

    #[test]
    fn tsv_corpus_parses() {
        let text = "id\ttext\tcreated_at\tlang\n1\ta\\tb\t2017-01-01T00:00:00Z\tar\n";
        let docs = parse_corpus(text, CorpusFormat::Tsv).unwrap();
        assert_eq!(docs[0].text, "a\tb");
        assert_eq!(docs[0].lang.as_deref(), Some("ar"));
    }

    #[test]
    fn labels_round_trip_and_monotonicity() {
        let mut hate = LabelRecord::offensive("x");
        hate.hate_targets.insert(HateTarget::Religion);
        hate.violence = true;
        let recs = vec![LabelRecord::clean("a"), hate];
        assert_eq!(parse_labels(&labels_to_tsv(&recs)).unwrap(), recs);

        let bad = format!("{LABELS_HEADER}\nq\t0\trace\t0\t0\n");
        assert!(parse_labels(&bad).is_err());
        assert!(LabelRecord::new("q", false, BTreeSet::new(), true, false).is_err());
    }

    #[test]
    fn split_file_round_trip() {
        let out = stratified_split(&labels(20, 7), SplitRatios::default(), 9).unwrap();
        let parsed = DatasetSplit::parse(&out.split.to_text()).unwrap();
        assert_eq!(parsed, out.split);
    }

    #[test]
    fn hundred_items_thirty_positive() {
        let l = labels(100, 30);
        let out = stratified_split(&l, SplitRatios::default(), 1).unwrap();
        assert_eq!(out.split.test.len(), 20);
        assert_eq!(out.split.dev.len(), 10);
        assert_eq!(out.split.train.len(), 70);
        let pos_test = count_pos(&out.split.test, &l);
        assert!((5..=7).contains(&pos_test), "{pos_test}");
    }

    #[test]
    fn single_class_is_deterministic() {
        let l = labels(10, 0);
        let a = stratified_split(&l, SplitRatios::default(), 42).unwrap();
        let b = stratified_split(&l, SplitRatios::default(), 42).unwrap();
        assert_eq!(a.split.to_text(), b.split.to_text());
    }

    #[test]
    fn tiny_class_goes_to_train_with_warning() {
        let l = labels(30, 2);
        let out = stratified_split(&l, SplitRatios::default(), 3).unwrap();
        assert_eq!(out.warnings.len(), 1);
        assert_eq!(count_pos(&out.split.train, &l), 2);
        assert_eq!(out.split.len(), 30);
    }

    #[test]
    fn bad_ratios_rejected() {
        assert!(SplitRatios::new(0.5, 0.1, 0.1).is_err());
        assert!("0.7,0.1,0.2".parse::<SplitRatios>().is_ok());
        assert!(stratified_split(&[], SplitRatios::default(), 0).is_err());
    }
}
