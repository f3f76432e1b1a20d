//! Local surrogate explanations by token masking.
//!
//! The document is normalized and split into tokens; random subsets of tokens
//! are dropped and the model rescored. A weighted ridge regression of those
//! scores on the keep/drop indicators gives one attribution per token.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::features::FeatureSpace;
use super::svm::LinearModel;
use crate::emoji::{is_emoji_cluster, SeedInventory};
use crate::normalize::{normalize, tokenize};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExplainConfig {
    pub n_samples: usize,
    /// Width `sigma` of the kernel `exp(-d^2 / sigma^2)`.
    pub kernel_width: f64,
    /// Penalty on token coefficients; the intercept is not penalized.
    pub ridge: f64,
    pub top_k: usize,
    pub seed: u64,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        ExplainConfig {
            n_samples: 1000,
            kernel_width: 0.25,
            ridge: 1.0,
            top_k: 10,
            seed: 0,
        }
    }
}

/// One explained token.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenWeight {
    pub position: usize,
    /// Display form; emojis are shown by alias.
    pub token: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    /// Attributions in token order.
    pub tokens: Vec<TokenWeight>,
    /// The `top_k` largest attributions by magnitude.
    pub top: Vec<TokenWeight>,
    pub intercept: f64,
    /// Weighted R^2 of the surrogate on its own samples.
    pub r2: f64,
    pub full_score: f64,
    pub empty_score: f64,
}

/// Tokens used for explanation: `(display, surface)` pairs.
pub fn explain_tokens(text: &str, space: &FeatureSpace, aliases: &SeedInventory) -> Vec<(String, String)> {
    tokenize(&normalize(text, &space.config.norm))
        .into_iter()
        .map(|t| {
            let display = if is_emoji_cluster(&t) { aliases.alias(&t) } else { t.clone() };
            (display, t)
        })
        .collect()
}

fn masked_score(
    surfaces: &[String],
    keep: &[bool],
    model: &LinearModel,
    space: &FeatureSpace,
) -> Result<f64> {
    let text: Vec<&str> = surfaces
        .iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|(s, _)| s.as_str())
        .collect();
    model.score(&space.vectorize(&text.join(" "))?)
}

/// Weighted ridge fit of `f` on the rows of `z` (no intercept column);
/// returns `(intercept, coefficients, weighted R^2)`.
pub fn weighted_ridge(z: &[Vec<f64>], f: &[f64], w: &[f64], lambda: f64) -> Result<(f64, Vec<f64>, f64)> {
    let n = z.len();
    if n == 0 || f.len() != n || w.len() != n {
        return Err(Error::invalid("weighted ridge needs aligned, non-empty samples"));
    }
    let p = z[0].len();
    let design = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { z[i][j - 1] });
    let wd = DMatrix::from_fn(n, p + 1, |i, j| w[i] * design[(i, j)]);
    let mut gram = design.transpose() * &wd;
    for j in 1..=p {
        gram[(j, j)] += lambda;
    }
    let rhs = wd.transpose() * DVector::from_column_slice(f);
    let beta = gram
        .clone()
        .cholesky()
        .map(|c| c.solve(&rhs))
        .or_else(|| gram.lu().solve(&rhs))
        .ok_or_else(|| Error::Undefined("surrogate system is singular".into()))?;
    let fitted = &design * &beta;
    let wsum: f64 = w.iter().sum();
    let mean = f.iter().zip(w).map(|(y, wi)| y * wi).sum::<f64>() / wsum;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for i in 0..n {
        ss_res += w[i] * (f[i] - fitted[i]).powi(2);
        ss_tot += w[i] * (f[i] - mean).powi(2);
    }
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res <= 1e-24 {
        1.0
    } else {
        0.0
    };
    Ok((beta[0], beta.iter().skip(1).copied().collect(), r2))
}

/// Explains the model's score on `text`.
pub fn explain(
    model: &LinearModel,
    space: &FeatureSpace,
    text: &str,
    aliases: &SeedInventory,
    cfg: &ExplainConfig,
) -> Result<Explanation> {
    let toks = explain_tokens(text, space, aliases);
    if toks.is_empty() {
        return Err(Error::invalid("document has no tokens to explain"));
    }
    if cfg.n_samples < 2 || !(cfg.kernel_width > 0.0) || cfg.ridge < 0.0 {
        return Err(Error::invalid("explain needs n_samples >= 2, kernel_width > 0, ridge >= 0"));
    }
    let surfaces: Vec<String> = toks.iter().map(|(_, s)| s.clone()).collect();
    let t = surfaces.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut z = Vec::with_capacity(cfg.n_samples);
    let mut f = Vec::with_capacity(cfg.n_samples);
    let mut w = Vec::with_capacity(cfg.n_samples);
    for s in 0..cfg.n_samples {
        let keep: Vec<bool> = if s == 0 {
            vec![true; t]
        } else {
            (0..t).map(|_| rng.random_bool(0.5)).collect()
        };
        let d = keep.iter().filter(|&&k| !k).count() as f64 / t as f64;
        w.push((-(d * d) / (cfg.kernel_width * cfg.kernel_width)).exp());
        f.push(masked_score(&surfaces, &keep, model, space)?);
        z.push(keep.iter().map(|&k| if k { 1.0 } else { 0.0 }).collect());
    }
    let (intercept, coef, r2) = weighted_ridge(&z, &f, &w, cfg.ridge)?;
    let tokens: Vec<TokenWeight> = toks
        .into_iter()
        .zip(&coef)
        .enumerate()
        .map(|(position, ((display, _), &weight))| TokenWeight { position, token: display, weight })
        .collect();
    let mut top = tokens.clone();
    top.sort_by(|a, b| b.weight.abs().total_cmp(&a.weight.abs()).then(a.position.cmp(&b.position)));
    top.truncate(cfg.top_k);
    Ok(Explanation {
        tokens,
        top,
        intercept,
        r2,
        full_score: f[0],
        empty_score: masked_score(&surfaces, &vec![false; t], model, space)?,
    })
}

impl Explanation {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("rank\tposition\ttoken\tweight\n");
        for (rank, tw) in self.top.iter().enumerate() {
            out.push_str(&format!("{}\t{}\t{}\t{}\n", rank + 1, tw.position, tw.token, tw.weight));
        }
        out.push_str(&format!("# intercept\t{}\n# r2\t{}\n", self.intercept, self.r2));
        out.push_str(&format!("# full_score\t{}\n# empty_score\t{}\n", self.full_score, self.empty_score));
        out
    }
}
