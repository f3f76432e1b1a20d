//! tf-idf n-gram features.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::normalize::{char_ngrams, normalize, tokenize, word_ngrams, NormalizationConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    Char,
    Word,
    CharWord,
}

impl FeatureMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureMode::Char => "char",
            FeatureMode::Word => "word",
            FeatureMode::CharWord => "char+word",
        }
    }

    fn uses_char(self) -> bool {
        matches!(self, FeatureMode::Char | FeatureMode::CharWord)
    }

    fn uses_word(self) -> bool {
        matches!(self, FeatureMode::Word | FeatureMode::CharWord)
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "char" | "c" => Ok(FeatureMode::Char),
            "word" | "w" => Ok(FeatureMode::Word),
            "char+word" | "c+w" => Ok(FeatureMode::CharWord),
            other => Err(Error::invalid(format!("unknown feature mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureConfig {
    pub mode: FeatureMode,
    pub char_range: (usize, usize),
    pub word_range: (usize, usize),
    pub norm: NormalizationConfig,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            mode: FeatureMode::Char,
            char_range: (2, 5),
            word_range: (1, 3),
            norm: NormalizationConfig::default(),
        }
    }
}

impl FeatureConfig {
    pub fn with_mode(mode: FeatureMode) -> Self {
        FeatureConfig { mode, ..Self::default() }
    }

    /// Text the n-grams are read from: normalized, lowercased, single spaces.
    pub fn prepare(&self, text: &str) -> String {
        let norm = normalize(text, &self.norm).to_lowercase();
        norm.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    /// Prefixed n-grams of `text`, with multiplicity.
    pub fn analyze(&self, text: &str) -> Result<Vec<String>> {
        let prepared = self.prepare(text);
        let mut out = Vec::new();
        if self.mode.uses_char() {
            let (lo, hi) = self.char_range;
            out.extend(char_ngrams(&prepared, lo, hi)?.into_iter().map(|g| format!("c:{g}")));
        }
        if self.mode.uses_word() {
            let (lo, hi) = self.word_range;
            let tokens = tokenize(&prepared);
            out.extend(word_ngrams(&tokens, lo, hi)?.into_iter().map(|g| format!("w:{g}")));
        }
        Ok(out)
    }
}

/// A sparse vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVec {
    pub dim: usize,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseVec {
    pub fn zeros(dim: usize) -> Self {
        SparseVec { dim, indices: Vec::new(), values: Vec::new() }
    }

    /// Builds from unsorted `(index, value)` pairs; duplicates are summed.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut map: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, v) in pairs {
            if i >= dim {
                return Err(Error::DimensionMismatch { expected: dim, found: i + 1 });
            }
            *map.entry(i).or_default() += v;
        }
        let (indices, values) = map.into_iter().filter(|(_, v)| *v != 0.0).unzip();
        Ok(SparseVec { dim, indices, values })
    }

    pub fn from_dense(dense: &[f64]) -> Self {
        let (indices, values) = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .unzip();
        SparseVec { dim: dense.len(), indices, values }
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_zero(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    pub fn dot(&self, other: &SparseVec) -> f64 {
        let (mut a, mut b, mut s) = (0, 0, 0.0);
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    s += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        s
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }
}

/// Vocabulary and idf weights learned from training documents.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpace {
    pub config: FeatureConfig,
    /// Sorted n-grams; position is the column index.
    pub terms: Vec<String>,
    pub idf: Vec<f64>,
    pub n_docs: usize,
    index: HashMap<String, usize>,
}

impl FeatureSpace {
    /// Assembles a space from stored parts (e.g. a model file).
    pub fn from_parts(config: FeatureConfig, terms: Vec<String>, idf: Vec<f64>, n_docs: usize) -> Result<Self> {
        if terms.len() != idf.len() {
            return Err(Error::DimensionMismatch { expected: terms.len(), found: idf.len() });
        }
        if terms.is_empty() {
            return Err(Error::invalid("empty vocabulary"));
        }
        if terms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("vocabulary must be sorted and unique"));
        }
        if idf.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::invalid("idf weights must be finite and positive"));
        }
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(FeatureSpace { config, terms, idf, n_docs, index })
    }

    pub fn dim(&self) -> usize {
        self.terms.len()
    }

    pub fn column(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// tf-idf vector scaled to unit L2 norm (zero if nothing is known).
    pub fn vectorize(&self, text: &str) -> Result<SparseVec> {
        let grams = self.config.analyze(text)?;
        let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
        for g in grams {
            if let Some(&i) = self.index.get(&g) {
                *tf.entry(i).or_default() += 1.0;
            }
        }
        let mut v = SparseVec {
            dim: self.dim(),
            indices: tf.keys().copied().collect(),
            values: tf.iter().map(|(&i, &c)| c * self.idf[i]).collect(),
        };
        let norm = v.norm_sq().sqrt();
        if norm > 0.0 {
            for x in &mut v.values {
                *x /= norm;
            }
        }
        Ok(v)
    }

    pub fn vectorize_all<S: AsRef<str>>(&self, texts: &[S]) -> Result<Vec<SparseVec>> {
        texts.iter().map(|t| self.vectorize(t.as_ref())).collect()
    }
}

/// Learns the vocabulary and smoothed idf, `ln((1 + N) / (1 + df)) + 1`.
pub fn fit_features<S: AsRef<str>>(texts: &[S], config: &FeatureConfig) -> Result<FeatureSpace> {
    if texts.is_empty() {
        return Err(Error::invalid("no training documents"));
    }
    config.norm.validate()?;
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for t in texts {
        let mut grams = config.analyze(t.as_ref())?;
        grams.sort_unstable();
        grams.dedup();
        for g in grams {
            *df.entry(g).or_default() += 1;
        }
    }
    if df.is_empty() {
        return Err(Error::invalid("training documents produce no n-grams"));
    }
    let n = texts.len() as f64;
    let (terms, idf): (Vec<String>, Vec<f64>) = df
        .into_iter()
        .map(|(g, d)| (g, ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0))
        .unzip();
    FeatureSpace::from_parts(config.clone(), terms, idf, texts.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_bigram() {
        let cfg = FeatureConfig { char_range: (2, 2), ..FeatureConfig::default() };
        let space = fit_features(&["ab"], &cfg).unwrap();
        assert_eq!(space.terms, vec!["c:ab"]);
        let v = space.vectorize("ab").unwrap();
        assert_eq!(v.values, vec![1.0]);
        assert!(space.vectorize("zz").unwrap().is_zero());
    }

    #[test]
    fn rare_terms_weigh_more() {
        let cfg = FeatureConfig::with_mode(FeatureMode::Word);
        let space = fit_features(&["كلب سيء", "كلب طيب", "كلب"], &cfg).unwrap();
        let common = space.idf[space.column("w:كلب").unwrap()];
        let rare = space.idf[space.column("w:سيء").unwrap()];
        assert!(common < rare);
        assert_eq!(common, 1.0);
    }

    #[test]
    fn empty_vocabulary_is_an_error() {
        let cfg = FeatureConfig::with_mode(FeatureMode::Word);
        assert!(fit_features(&["...", "!!"], &cfg).is_err());
        assert!(fit_features::<&str>(&[], &cfg).is_err());
    }

    #[test]
    fn modes_prefix_features() {
        let cfg = FeatureConfig::with_mode(FeatureMode::CharWord);
        let space = fit_features(&["Ab cd"], &cfg).unwrap();
        assert!(space.column("c:ab").is_some());
        assert!(space.column("w:ab cd").is_some());
        assert!(space.terms.iter().all(|t| t.starts_with("c:") || t.starts_with("w:")));
    }

    proptest! {
        #[test]
        fn unit_norm(docs in proptest::collection::vec("[a-d ]{1,12}", 1..8), probe in "[a-d ]{0,12}") {
            let cfg = FeatureConfig::with_mode(FeatureMode::CharWord);
            let Ok(space) = fit_features(&docs, &cfg) else { return Ok(()); };
            let v = space.vectorize(&probe).unwrap();
            if !v.is_zero() {
                prop_assert!((v.norm_sq().sqrt() - 1.0).abs() < 1e-9);
            }
            prop_assert!(space.idf.iter().all(|x| *x > 0.0));
        }
    }
}
