//! Linear soft-margin SVM with an unregularized bias.
//!
//! Minimizes `0.5 * |w|^2 + C * sum_i max(0, 1 - y_i (w . x_i + b))` through
//! its dual `min 0.5 |sum_i a_i y_i x_i|^2 - sum_i a_i` subject to
//! `0 <= a_i <= C` and `sum_i a_i y_i = 0`. Each step moves one pair of dual
//! variables along the equality constraint with an exact clipped line search,
//! so the dual objective never increases. For any `w` the best bias follows
//! exactly from the hinge term, which gives a primal value at every epoch;
//! training stops once it is within `rel_tol` of the dual bound.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::features::SparseVec;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub c: f64,
    pub seed: u64,
    pub max_epochs: usize,
    /// Stop once the primal objective is within this relative distance of
    /// the dual lower bound.
    pub rel_tol: f64,
    /// Stop once the maximal KKT violation drops below this.
    pub kkt_tol: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            c: 1.0,
            seed: 0,
            max_epochs: 1000,
            rel_tol: 1e-6,
            kkt_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub c: f64,
    pub train_seed: u64,
    /// Primal objective at `(weights, bias)`.
    pub objective_value: f64,
    pub epochs: usize,
}

/// Per-epoch record of a training run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainTrace {
    /// Dual objective after each epoch.
    pub dual_objective: Vec<f64>,
    /// Maximal KKT violation measured at the start of each epoch.
    pub kkt_gap: Vec<f64>,
    /// Relative primal-dual gap measured at the start of each epoch.
    pub duality_gap: Vec<f64>,
}

impl LinearModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Signed margin `w . x + b`.
    pub fn score(&self, x: &SparseVec) -> Result<f64> {
        if x.dim != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                found: x.dim,
            });
        }
        Ok(x.dot_dense(&self.weights) + self.bias)
    }

    /// Label and score; a zero score counts as negative.
    pub fn predict(&self, x: &SparseVec) -> Result<(bool, f64)> {
        let s = self.score(x)?;
        Ok((s > 0.0, s))
    }
}

fn sign(y: bool) -> f64 {
    if y {
        1.0
    } else {
        -1.0
    }
}

/// Primal objective of `(w, b)` on the data.
pub fn primal_objective(x: &[SparseVec], y: &[bool], w: &[f64], b: f64, c: f64) -> f64 {
    let scores: Vec<f64> = x.iter().map(|xi| xi.dot_dense(w)).collect();
    primal_objective_from_scores(&scores, y, w, b, c)
}

fn primal_objective_from_scores(scores: &[f64], y: &[bool], w: &[f64], b: f64, c: f64) -> f64 {
    let reg = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
    let hinge: f64 = scores
        .iter()
        .zip(y)
        .map(|(s, &yi)| (1.0 - sign(yi) * (s + b)).max(0.0))
        .sum();
    reg + c * hinge
}

/// Bias minimizing `sum_i max(0, 1 - y_i (s_i + b))`; the middle of the
/// minimizing interval when it is not a single point.
///
/// Every term has its kink at `y_i - s_i` and each kink raises the slope by
/// one, starting from `-n_pos`. The slope is therefore zero exactly between
/// the `n_pos`-th and `(n_pos + 1)`-th smallest kinks.
pub fn optimal_bias(scores: &[f64], y: &[bool]) -> f64 {
    let mut kinks: Vec<f64> = scores.iter().zip(y).map(|(s, &yi)| sign(yi) - s).collect();
    kinks.sort_by(f64::total_cmp);
    let n_pos = y.iter().filter(|&&v| v).count();
    match (n_pos.checked_sub(1).and_then(|k| kinks.get(k)), kinks.get(n_pos)) {
        (Some(lo), Some(hi)) => 0.5 * (lo + hi),
        (Some(lo), None) => *lo,
        (None, Some(hi)) => *hi,
        (None, None) => 0.0,
    }
}

struct Solver<'a> {
    x: &'a [SparseVec],
    y: Vec<f64>,
    c: f64,
    alpha: Vec<f64>,
    w: Vec<f64>,
    sq_norm: Vec<f64>,
}

impl Solver<'_> {
    fn f(&self, i: usize) -> f64 {
        self.x[i].dot_dense(&self.w) - self.y[i]
    }

    fn dual(&self) -> f64 {
        0.5 * self.w.iter().map(|v| v * v).sum::<f64>() - self.alpha.iter().sum::<f64>()
    }

    fn can_raise(&self, i: usize) -> bool {
        // y_i * a_i can still increase
        if self.y[i] > 0.0 {
            self.alpha[i] < self.c
        } else {
            self.alpha[i] > 0.0
        }
    }

    fn can_lower(&self, i: usize) -> bool {
        if self.y[i] > 0.0 {
            self.alpha[i] > 0.0
        } else {
            self.alpha[i] < self.c
        }
    }

    /// Exact line search on `a_i += y_i t, a_j -= y_j t`.
    fn step(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let g = self.f(i) - self.f(j);
        if g == 0.0 {
            return;
        }
        let q = (self.sq_norm[i] + self.sq_norm[j] - 2.0 * self.x[i].dot(&self.x[j])).max(0.0);
        let mut t = if q > 1e-14 { -g / q } else { -g.signum() * f64::INFINITY };
        // box limits for a_i + y_i t and a_j - y_j t
        let (yi, yj, c) = (self.y[i], self.y[j], self.c);
        let (ai, aj) = (self.alpha[i], self.alpha[j]);
        let (lo_i, hi_i) = if yi > 0.0 { (-ai, c - ai) } else { (ai - c, ai) };
        let (lo_j, hi_j) = if yj > 0.0 { (aj - c, aj) } else { (-aj, c - aj) };
        t = t.clamp(lo_i.max(lo_j), hi_i.min(hi_j));
        if t == 0.0 || !t.is_finite() {
            return;
        }
        self.alpha[i] = (ai + yi * t).clamp(0.0, c);
        self.alpha[j] = (aj - yj * t).clamp(0.0, c);
        for (k, v) in self.x[i].iter() {
            self.w[k] += t * v;
        }
        for (k, v) in self.x[j].iter() {
            self.w[k] -= t * v;
        }
    }
}

/// Trains on sparse rows `x` with labels `y` (true = positive class).
pub fn train(x: &[SparseVec], y: &[bool], cfg: &TrainConfig) -> Result<(LinearModel, TrainTrace)> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    if !y.iter().any(|&v| v) || y.iter().all(|&v| v) {
        return Err(Error::invalid("training needs both classes"));
    }
    if !(cfg.c > 0.0 && cfg.c.is_finite()) {
        return Err(Error::invalid(format!("C must be positive, got {}", cfg.c)));
    }
    let dim = x[0].dim;
    if let Some(bad) = x.iter().find(|v| v.dim != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.dim });
    }
    let n = x.len();
    let mut s = Solver {
        x,
        y: y.iter().map(|&v| sign(v)).collect(),
        c: cfg.c,
        alpha: vec![0.0; n],
        w: vec![0.0; dim],
        sq_norm: x.iter().map(SparseVec::norm_sq).collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut trace = TrainTrace::default();
    let mut prev = s.dual();
    let mut epochs = 0;
    loop {
        let f: Vec<f64> = (0..n).map(|i| s.f(i)).collect();
        let scores: Vec<f64> = f.iter().zip(&s.y).map(|(fi, yi)| fi + yi).collect();
        let primal = primal_objective_from_scores(&scores, y, &s.w, optimal_bias(&scores, y), cfg.c);
        // -dual is a lower bound on the primal optimum
        let rel_gap = (primal + prev) / primal.abs().max(1e-12);
        let mut up: Vec<usize> = (0..n).filter(|&i| s.can_raise(i)).collect();
        let mut low: Vec<usize> = (0..n).filter(|&i| s.can_lower(i)).collect();
        let min_up = up.iter().map(|&i| f[i]).fold(f64::INFINITY, f64::min);
        let max_low = low.iter().map(|&i| f[i]).fold(f64::NEG_INFINITY, f64::max);
        let gap = max_low - min_up;
        trace.kkt_gap.push(gap.max(0.0));
        trace.duality_gap.push(rel_gap);
        if gap <= cfg.kkt_tol || rel_gap < cfg.rel_tol || epochs >= cfg.max_epochs {
            break;
        }
        epochs += 1;
        up.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
        low.sort_by(|&a, &b| f[b].total_cmp(&f[a]).then(a.cmp(&b)));
        for (&i, &j) in up.iter().zip(&low) {
            if f[j] - f[i] <= cfg.kkt_tol {
                break;
            }
            s.step(i, j);
        }
        order.shuffle(&mut rng);
        for pair in order.chunks_exact(2) {
            s.step(pair[0], pair[1]);
        }
        let cur = s.dual();
        assert!(
            cur <= prev + 1e-9 * (1.0 + prev.abs()),
            "dual objective increased from {prev} to {cur}"
        );
        trace.dual_objective.push(cur);
        prev = cur;
    }
    let scores: Vec<f64> = x.iter().map(|xi| xi.dot_dense(&s.w)).collect();
    let bias = optimal_bias(&scores, y);
    let objective_value = primal_objective(x, y, &s.w, bias, cfg.c);
    Ok((
        LinearModel {
            weights: s.w,
            bias,
            c: cfg.c,
            train_seed: cfg.seed,
            objective_value,
            epochs,
        },
        trace,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[f64]]) -> Vec<SparseVec> {
        rows.iter().map(|r| SparseVec::from_dense(r)).collect()
    }

    #[test]
    fn separable_pair_has_no_hinge() {
        let x = dense(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let y = [true, false];
        let (m, _) = train(&x, &y, &TrainConfig::default()).unwrap();
        for (xi, &yi) in x.iter().zip(&y) {
            let s = m.score(xi).unwrap();
            assert!(sign(yi) * s >= 1.0 - 1e-6, "margin {s}");
        }
        // optimum: w = (1, -1), b = 0, objective 1
        assert!((m.objective_value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn label_flip_negates() {
        let x = dense(&[&[1.0, 0.2], &[0.9, 0.1], &[0.1, 1.0], &[0.0, 0.8], &[0.5, 0.6]]);
        let y = [true, true, false, false, true];
        let flipped: Vec<bool> = y.iter().map(|v| !v).collect();
        let (a, _) = train(&x, &y, &TrainConfig::default()).unwrap();
        let (b, _) = train(&x, &flipped, &TrainConfig::default()).unwrap();
        for xi in &x {
            let (sa, sb) = (a.score(xi).unwrap(), b.score(xi).unwrap());
            assert!(sa * sb < 0.0);
            assert!((sa + sb).abs() < 1e-4);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let x = dense(&[&[1.0], &[2.0]]);
        assert!(train(&x, &[true, true], &TrainConfig::default()).is_err());
        assert!(train(&x, &[true], &TrainConfig::default()).is_err());
        let (m, _) = train(&x, &[true, false], &TrainConfig::default()).unwrap();
        assert!(m.predict(&SparseVec::zeros(3)).is_err());
        let (label, score) = m.predict(&SparseVec::zeros(1)).unwrap();
        assert_eq!(label, m.bias > 0.0);
        assert_eq!(score, m.bias);
    }

    #[test]
    fn bias_minimizes_hinge() {
        let scores = [0.3, -0.2, 1.5, -1.1, 0.0];
        let y = [true, false, true, false, false];
        let b = optimal_bias(&scores, &y);
        let h = |b: f64| -> f64 {
            scores.iter().zip(&y).map(|(s, &yi)| (1.0 - sign(yi) * (s + b)).max(0.0)).sum()
        };
        for k in -300..300 {
            let probe = k as f64 / 100.0;
            assert!(h(b) <= h(probe) + 1e-12, "b={b} probe={probe}");
        }
    }
}
