//! Valence-score lexicon mining.
//!
//! For a term `t` seen `n_pos` times in the positive partition (out of
//! `N_pos` token occurrences) and `n_neg` times in the negative one (out of
//! `N_neg`), the valence is
//!
//! ```text
//! V(t) = 2 * r_pos / (r_pos + r_neg) - 1,   r_pos = n_pos / N_pos,  r_neg = n_neg / N_neg
//! ```
//!
//! which lies in `[-1, 1]`: 1 for terms only seen in the positive partition,
//! -1 for terms only seen in the negative one. Writing `a = n_pos * N_neg`
//! and `b = n_neg * N_pos`, `V = (a - b) / (a + b)`, so thresholds and
//! rankings are decided on integers and never depend on float rounding.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::ToPrimitive;

use crate::corpus::{Document, HateTarget, LabelRecord};
use crate::normalize::{normalize, tokenize, NormalizationConfig};
use crate::tsv::{self, content_lines};
use crate::{Error, Result};

/// Per-term occurrence counts in a positive and a negative partition.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermCounts {
    terms: BTreeMap<String, (u64, u64)>,
    total_pos: u64,
    total_neg: u64,
}

impl TermCounts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds every token occurrence of one document.
    pub fn add_tokens<S: AsRef<str>>(&mut self, tokens: &[S], positive: bool) {
        for t in tokens {
            self.add(t.as_ref(), positive, 1);
        }
    }

    pub fn add(&mut self, term: &str, positive: bool, count: u64) {
        if count == 0 {
            return;
        }
        let entry = self.terms.entry(term.to_owned()).or_default();
        if positive {
            entry.0 += count;
            self.total_pos += count;
        } else {
            entry.1 += count;
            self.total_neg += count;
        }
    }

    /// `(n_pos, n_neg)` for a term; zeros when unseen.
    pub fn get(&self, term: &str) -> (u64, u64) {
        self.terms.get(term).copied().unwrap_or((0, 0))
    }

    pub fn total_pos(&self) -> u64 {
        self.total_pos
    }

    pub fn total_neg(&self) -> u64 {
        self.total_neg
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64, u64)> {
        self.terms.iter().map(|(t, &(p, n))| (t.as_str(), p, n))
    }

    /// The same counts with the partitions exchanged.
    pub fn swapped(&self) -> Self {
        TermCounts {
            terms: self
                .terms
                .iter()
                .map(|(t, &(p, n))| (t.clone(), (n, p)))
                .collect(),
            total_pos: self.total_neg,
            total_neg: self.total_pos,
        }
    }

    fn check_totals(&self) -> Result<()> {
        if self.total_pos == 0 || self.total_neg == 0 {
            return Err(Error::Undefined(
                "valence needs token occurrences in both partitions".into(),
            ));
        }
        Ok(())
    }
}

/// `(a - b, a + b)` with `a = n_pos * N_neg`, `b = n_neg * N_pos`.
fn valence_parts(n_pos: u64, n_neg: u64, total_pos: u64, total_neg: u64) -> (BigInt, BigInt) {
    let a = BigInt::from(n_pos) * BigInt::from(total_neg);
    let b = BigInt::from(n_neg) * BigInt::from(total_pos);
    (&a - &b, a + b)
}

/// Exact valence as a rational number.
pub fn valence_exact(n_pos: u64, n_neg: u64, total_pos: u64, total_neg: u64) -> Result<BigRational> {
    if total_pos == 0 || total_neg == 0 || n_pos + n_neg == 0 {
        return Err(Error::Undefined("valence needs both partitions and a seen term".into()));
    }
    let (num, den) = valence_parts(n_pos, n_neg, total_pos, total_neg);
    Ok(BigRational::new(num, den))
}

fn valence_f64(n_pos: u64, n_neg: u64, total_pos: u64, total_neg: u64) -> f64 {
    const EXACT: u128 = 1 << 53;
    let a = u128::from(n_pos) * u128::from(total_neg);
    let b = u128::from(n_neg) * u128::from(total_pos);
    if a + b < EXACT {
        // both operands exact, so the quotient is correctly rounded
        (a as f64 - b as f64) / (a + b) as f64
    } else {
        let (num, den) = valence_parts(n_pos, n_neg, total_pos, total_neg);
        BigRational::new(num, den).to_f64().unwrap_or(f64::NAN)
    }
}

/// Valence of `term` under `counts`.
pub fn valence(term: &str, counts: &TermCounts) -> Result<f64> {
    counts.check_totals()?;
    let (p, n) = counts.get(term);
    if p + n == 0 {
        return Err(Error::Undefined(format!("term {term:?} unseen in both partitions")));
    }
    Ok(valence_f64(p, n, counts.total_pos, counts.total_neg))
}

/// Compares valences of two terms under the same totals, exactly.
fn cmp_valence(a: (u64, u64), b: (u64, u64)) -> Ordering {
    // V is increasing in n_pos / n_neg; the partition totals cancel.
    let lhs = u128::from(a.0) * u128::from(b.1);
    let rhs = u128::from(b.0) * u128::from(a.1);
    lhs.cmp(&rhs)
}

/// Parses a decimal such as `0.8` or `-0.25` into an exact ratio.
pub fn parse_decimal(s: &str) -> Result<Ratio<i64>> {
    let bad = || Error::invalid(format!("not a decimal number: {s:?}"));
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
        || frac.len() > 15
    {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
    let den = 10i64.pow(frac.len() as u32);
    Ok(Ratio::new(if neg { -num } else { num }, den))
}

/// Thresholds for lexicon extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconConfig {
    /// Inclusive lower bound on valence.
    pub min_valence: Ratio<i64>,
    /// Inclusive lower bound on `n_pos + n_neg`.
    pub min_freq: u64,
}

impl Default for LexiconConfig {
    fn default() -> Self {
        LexiconConfig {
            min_valence: Ratio::new(4, 5),
            min_freq: 5,
        }
    }
}

/// A mined term.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub term: String,
    pub n_pos: u64,
    pub n_neg: u64,
    pub valence: f64,
}

impl LexiconEntry {
    pub fn freq(&self) -> u64 {
        self.n_pos + self.n_neg
    }
}

/// Entries passing the thresholds, ranked by valence then frequency
/// (both descending), ties broken by term.
pub fn rank_lexicon(counts: &TermCounts, cfg: &LexiconConfig) -> Result<Vec<LexiconEntry>> {
    counts.check_totals()?;
    let p = BigInt::from(*cfg.min_valence.numer());
    let q = BigInt::from(*cfg.min_valence.denom());
    let mut picked: Vec<(&str, u64, u64)> = counts
        .iter()
        .filter(|&(_, np, nn)| np + nn >= cfg.min_freq && np + nn > 0)
        .filter(|&(_, np, nn)| {
            let (diff, sum) = valence_parts(np, nn, counts.total_pos, counts.total_neg);
            // (a - b) / (a + b) >= p / q  with a + b > 0, q > 0
            &q * diff >= &p * sum
        })
        .collect();
    picked.sort_by(|x, y| {
        cmp_valence((y.1, y.2), (x.1, x.2))
            .then_with(|| (y.1 + y.2).cmp(&(x.1 + x.2)))
            .then_with(|| x.0.cmp(y.0))
    });
    Ok(picked
        .into_iter()
        .map(|(term, np, nn)| LexiconEntry {
            term: term.to_owned(),
            n_pos: np,
            n_neg: nn,
            valence: valence_f64(np, nn, counts.total_pos, counts.total_neg),
        })
        .collect())
}

/// Which labeled class forms the positive partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexiconClass {
    Offensive,
    Hate,
    Vulgar,
    Violence,
}

impl LexiconClass {
    pub fn contains(self, label: &LabelRecord) -> bool {
        match self {
            LexiconClass::Offensive => label.offensive,
            LexiconClass::Hate => label.is_hate(),
            LexiconClass::Vulgar => label.vulgar,
            LexiconClass::Violence => label.violence,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LexiconClass::Offensive => "offensive",
            LexiconClass::Hate => "hate",
            LexiconClass::Vulgar => "vulgar",
            LexiconClass::Violence => "violence",
        }
    }
}

impl FromStr for LexiconClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "offensive" => Ok(LexiconClass::Offensive),
            "hate" => Ok(LexiconClass::Hate),
            "vulgar" => Ok(LexiconClass::Vulgar),
            "violence" => Ok(LexiconClass::Violence),
            other => Err(Error::invalid(format!("unknown class {other:?}"))),
        }
    }
}

/// Counts normalized tokens with the class as the positive partition and
/// every other document as the negative one.
pub fn count_terms(
    corpus: &[Document],
    labels: &[LabelRecord],
    class: LexiconClass,
    norm: &NormalizationConfig,
) -> Result<TermCounts> {
    let by_id: HashMap<&str, &LabelRecord> =
        labels.iter().map(|l| (l.doc_id.as_str(), l)).collect();
    let mut counts = TermCounts::new();
    let (mut n_pos_docs, mut n_neg_docs) = (0usize, 0usize);
    for doc in corpus {
        let label = by_id
            .get(doc.id.as_str())
            .ok_or_else(|| Error::MissingLabel(doc.id.clone()))?;
        let positive = class.contains(label);
        if positive {
            n_pos_docs += 1;
        } else {
            n_neg_docs += 1;
        }
        counts.add_tokens(&tokenize(&normalize(&doc.text, norm)), positive);
    }
    if n_pos_docs == 0 {
        return Err(Error::invalid(format!("no {} documents", class.as_str())));
    }
    if n_neg_docs == 0 {
        return Err(Error::invalid(format!(
            "every document is {}; the contrast partition is empty",
            class.as_str()
        )));
    }
    Ok(counts)
}

/// Offensive-vs-clean lexicon.
pub fn mine_lexicon(
    corpus: &[Document],
    labels: &[LabelRecord],
    norm: &NormalizationConfig,
    cfg: &LexiconConfig,
) -> Result<Vec<LexiconEntry>> {
    mine_class_lexicon(corpus, labels, LexiconClass::Offensive, norm, cfg)
}

/// Lexicon of terms distinctive of `class` against all other documents.
pub fn mine_class_lexicon(
    corpus: &[Document],
    labels: &[LabelRecord],
    class: LexiconClass,
    norm: &NormalizationConfig,
    cfg: &LexiconConfig,
) -> Result<Vec<LexiconEntry>> {
    let counts = count_terms(corpus, labels, class, norm)?;
    rank_lexicon(&counts, cfg)
}

pub const LEXICON_HEADER: &str = "term\tn_off\tn_cln\tvalence";

pub fn lexicon_to_tsv(entries: &[LexiconEntry]) -> String {
    let mut out = format!("{LEXICON_HEADER}\n");
    for e in entries {
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.6}\n",
            tsv::escape(&e.term),
            e.n_pos,
            e.n_neg,
            e.valence
        ));
    }
    out
}

/// Named groups of normalized terms, e.g. religious groups.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gazetteer {
    groups: BTreeMap<String, BTreeSet<String>>,
}

pub const DEFAULT_RELIGION_GAZETTEER: &str = include_str!("../data/religion_gazetteer.tsv");

impl Gazetteer {
    /// Builds a gazetteer; every term is normalized with `norm`.
    pub fn new<I, S>(groups: I, norm: &NormalizationConfig) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<S>)>,
        S: AsRef<str>,
    {
        let mut out = Gazetteer::default();
        for (group, terms) in groups {
            let set: BTreeSet<String> = terms
                .iter()
                .map(|t| normalize(t.as_ref().trim(), norm))
                .filter(|t| !t.is_empty())
                .collect();
            if set.is_empty() {
                return Err(Error::invalid(format!(
                    "gazetteer group {:?} has no terms",
                    group.as_ref()
                )));
            }
            out.groups
                .entry(group.as_ref().to_owned())
                .or_default()
                .extend(set);
        }
        Ok(out)
    }

    /// Parses `group<TAB>term1,term2,...` lines.
    pub fn parse(text: &str, norm: &NormalizationConfig) -> Result<Self> {
        let mut groups = Vec::new();
        for (line, raw) in content_lines(text) {
            let (group, terms) = raw
                .split_once('\t')
                .ok_or_else(|| Error::parse(line, "expected group<TAB>terms"))?;
            groups.push((
                group.trim().to_owned(),
                terms.split(',').map(|t| t.trim().to_owned()).collect(),
            ));
        }
        Self::new(groups, norm)
    }

    pub fn load(path: &Path, norm: &NormalizationConfig) -> Result<Self> {
        Self::parse(&tsv::read_to_string(path)?, norm)
    }

    pub fn default_religion(norm: &NormalizationConfig) -> Self {
        Self::parse(DEFAULT_RELIGION_GAZETTEER, norm).expect("bundled gazetteer parses")
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> impl Iterator<Item = (&str, &BTreeSet<String>)> {
        self.groups.iter().map(|(g, t)| (g.as_str(), t))
    }
}

/// Count and share of hate documents mentioning a group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupShare {
    pub count: usize,
    pub fraction: f64,
}

/// For every gazetteer group, the number of hate documents whose normalized
/// tokens hit the group, and that number over all hate documents considered.
/// `only_target` restricts the hate documents to one annotated target.
pub fn target_distribution(
    corpus: &[Document],
    labels: &[LabelRecord],
    gazetteer: &Gazetteer,
    only_target: Option<HateTarget>,
    norm: &NormalizationConfig,
) -> Result<BTreeMap<String, GroupShare>> {
    if gazetteer.is_empty() {
        return Err(Error::invalid("gazetteer is empty"));
    }
    let by_id: HashMap<&str, &LabelRecord> =
        labels.iter().map(|l| (l.doc_id.as_str(), l)).collect();
    let mut counts: BTreeMap<String, usize> =
        gazetteer.groups().map(|(g, _)| (g.to_owned(), 0)).collect();
    let mut n_hate = 0usize;
    for doc in corpus {
        let Some(label) = by_id.get(doc.id.as_str()) else {
            continue;
        };
        let relevant = match only_target {
            Some(t) => label.hate_targets.contains(&t),
            None => label.is_hate(),
        };
        if !relevant {
            continue;
        }
        n_hate += 1;
        let tokens: BTreeSet<String> = tokenize(&normalize(&doc.text, norm)).into_iter().collect();
        for (group, terms) in gazetteer.groups() {
            if !terms.is_disjoint(&tokens) {
                *counts.get_mut(group).expect("group present") += 1;
            }
        }
    }
    Ok(counts
        .into_iter()
        .map(|(g, count)| {
            let fraction = if n_hate == 0 { 0.0 } else { count as f64 / n_hate as f64 };
            (g, GroupShare { count, fraction })
        })
        .collect())
}
