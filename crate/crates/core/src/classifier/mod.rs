//! tf-idf n-gram features, a linear SVM, evaluation and explanations.

pub mod eval;
pub mod explain;
pub mod features;
pub mod svm;

use std::fmt::Write as _;
use std::path::Path;

pub use eval::{
    evaluate, evaluate_predictions, load_predictions, parse_predictions, predictions_to_tsv, ClassMetrics,
    EvalReport, Prediction, PREDICTIONS_HEADER,
};
pub use explain::{explain, ExplainConfig, Explanation, TokenWeight};
pub use features::{fit_features, FeatureConfig, FeatureMode, FeatureSpace, SparseVec};
pub use svm::{train, LinearModel, TrainConfig, TrainTrace};

use crate::normalize::NormalizationConfig;
use crate::tsv::{self, content_lines};
use crate::{Error, Result};

/// A feature space together with the model trained on it.
#[derive(Debug, Clone, PartialEq)]
pub struct TextClassifier {
    pub space: FeatureSpace,
    pub model: LinearModel,
}

const MODEL_MAGIC: &str = "offanchor-linear-model";
const MODEL_VERSION: u32 = 1;

impl TextClassifier {
    /// Fits features on `texts` and trains on them.
    pub fn fit<S: AsRef<str>>(
        texts: &[S],
        labels: &[bool],
        features: &FeatureConfig,
        training: &TrainConfig,
    ) -> Result<(Self, TrainTrace)> {
        let space = fit_features(texts, features)?;
        let x = space.vectorize_all(texts)?;
        let (model, trace) = train(&x, labels, training)?;
        Ok((TextClassifier { space, model }, trace))
    }

    pub fn score(&self, text: &str) -> Result<f64> {
        self.model.score(&self.space.vectorize(text)?)
    }

    pub fn predict(&self, text: &str) -> Result<(bool, f64)> {
        self.model.predict(&self.space.vectorize(text)?)
    }

    /// Text dump: header settings, then one `term, idf, weight` row per
    /// column. Floats use the shortest representation that parses back to
    /// the same value.
    pub fn to_text(&self) -> String {
        let cfg = &self.space.config;
        let mut out = String::new();
        let _ = writeln!(out, "{MODEL_MAGIC}\t{MODEL_VERSION}");
        let _ = writeln!(out, "mode\t{}", cfg.mode);
        let _ = writeln!(out, "char_range\t{}\t{}", cfg.char_range.0, cfg.char_range.1);
        let _ = writeln!(out, "word_range\t{}\t{}", cfg.word_range.0, cfg.word_range.1);
        for kv in cfg.norm.to_kv_text().lines() {
            let _ = writeln!(out, "norm\t{}", tsv::escape(kv));
        }
        let _ = writeln!(out, "n_docs\t{}", self.space.n_docs);
        let _ = writeln!(out, "c\t{}", self.model.c);
        let _ = writeln!(out, "seed\t{}", self.model.train_seed);
        let _ = writeln!(out, "epochs\t{}", self.model.epochs);
        let _ = writeln!(out, "objective\t{}", self.model.objective_value);
        let _ = writeln!(out, "bias\t{}", self.model.bias);
        let _ = writeln!(out, "columns\t{}", self.space.dim());
        for ((term, idf), w) in self.space.terms.iter().zip(&self.space.idf).zip(&self.model.weights) {
            let _ = writeln!(out, "{}\t{idf}\t{w}", tsv::escape(term));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("model file ends before {what}")))
        };
        let (line, head) = next("header")?;
        if head != format!("{MODEL_MAGIC}\t{MODEL_VERSION}") {
            return Err(Error::parse(line, "not a version 1 model file"));
        }
        let mut mode = None;
        let mut char_range = None;
        let mut word_range = None;
        let mut norm = NormalizationConfig::default();
        let mut fields: std::collections::HashMap<&str, (usize, &str)> = Default::default();
        let columns: usize;
        loop {
            let (line, raw) = next("columns")?;
            let (key, rest) = raw.split_once('\t').ok_or_else(|| Error::parse(line, "expected key<TAB>value"))?;
            let range = |rest: &str| -> Result<(usize, usize)> {
                let (a, b) = rest.split_once('\t').ok_or_else(|| Error::parse(line, "expected two values"))?;
                let p = |s: &str| s.parse().map_err(|_| Error::parse(line, format!("bad integer {s:?}")));
                Ok((p(a)?, p(b)?))
            };
            match key {
                "mode" => mode = Some(rest.parse::<FeatureMode>().map_err(|e| Error::parse(line, e.to_string()))?),
                "char_range" => char_range = Some(range(rest)?),
                "word_range" => word_range = Some(range(rest)?),
                "norm" => norm.set(&tsv::unescape(rest), line)?,
                "columns" => {
                    columns = rest.parse().map_err(|_| Error::parse(line, "bad column count"))?;
                    break;
                }
                other => {
                    fields.insert(other, (line, rest));
                }
            }
        }
        let get = |key: &str| -> Result<(usize, &str)> {
            fields.get(key).copied().ok_or_else(|| Error::parse(0, format!("model file lacks {key}")))
        };
        fn num<T: std::str::FromStr>((line, s): (usize, &str)) -> Result<T> {
            s.parse().map_err(|_| Error::parse(line, format!("bad number {s:?}")))
        }
        let mut terms = Vec::with_capacity(columns);
        let mut idf = Vec::with_capacity(columns);
        let mut weights = Vec::with_capacity(columns);
        for _ in 0..columns {
            let (line, raw) = next("all columns")?;
            let mut cols = raw.rsplitn(3, '\t');
            let (w, i, t) = match (cols.next(), cols.next(), cols.next()) {
                (Some(w), Some(i), Some(t)) => (w, i, t),
                _ => return Err(Error::parse(line, "expected term<TAB>idf<TAB>weight")),
            };
            terms.push(tsv::unescape(t));
            idf.push(num((line, i))?);
            weights.push(num((line, w))?);
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::parse(line, "trailing content after the last column"));
        }
        norm.validate()?;
        let config = FeatureConfig {
            mode: mode.ok_or_else(|| Error::parse(0, "model file lacks mode"))?,
            char_range: char_range.ok_or_else(|| Error::parse(0, "model file lacks char_range"))?,
            word_range: word_range.ok_or_else(|| Error::parse(0, "model file lacks word_range"))?,
            norm,
        };
        let space = FeatureSpace::from_parts(config, terms, idf, num(get("n_docs")?)?)?;
        let model = LinearModel {
            weights,
            bias: num(get("bias")?)?,
            c: num(get("c")?)?,
            train_seed: num(get("seed")?)?,
            objective_value: num(get("objective")?)?,
            epochs: num(get("epochs")?)?,
        };
        if model.weights.iter().any(|w| !w.is_finite()) || !model.bias.is_finite() {
            return Err(Error::invalid("model weights must be finite"));
        }
        Ok(TextClassifier { space, model })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&tsv::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_text_round_trip() {
        let docs = ["كلب\tقذر", "انت كلب", "يوم جميل", "صباح الخير 🌞", "كلب حقير\\", "مساء جميل"];
        let y = [true, true, false, false, true, false];
        let (clf, _) = TextClassifier::fit(
            &docs,
            &y,
            &FeatureConfig::with_mode(FeatureMode::CharWord),
            &TrainConfig { seed: 3, ..TrainConfig::default() },
        )
        .unwrap();
        let text = clf.to_text();
        let back = TextClassifier::parse(&text).unwrap();
        assert_eq!(back, clf);
        for d in docs.iter().chain(["شيء جديد"].iter()) {
            assert_eq!(back.score(d).unwrap(), clf.score(d).unwrap());
        }
        assert!(TextClassifier::parse(&text.replace(MODEL_MAGIC, "other")).is_err());
        let truncated: String = text.lines().take(20).map(|l| format!("{l}\n")).collect();
        assert!(TextClassifier::parse(&truncated).is_err());
    }
}
