//! Soft-margin linear max-margin classifier trained in the dual.
//!
//! The dual is solved as the minimisation `½αᵀQα − eᵀα` with
//! `Q_ij = y_i y_j ⟨x_i, x_j⟩`, subject to `yᵀα = 0` and `0 ≤ α_i ≤ C`, by
//! sequential minimal optimisation: each step picks the maximal violating
//! index `i` and the partner `j` with the best second-order gain, then
//! solves the two-variable subproblem analytically. Ties go to the lowest
//! index. Iteration stops once the KKT gap `m(α) − M(α)` is at most `tol`.

use std::fmt::Write as _;
use std::io::Write;

use crate::datagen::LabeledInstance;
use crate::{sgn, Error, Label, Result};

/// Equality tolerance on `Σ y_i α_i` and on the representer identity.
pub const EQ_TOL: f64 = 1e-8;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    /// Box bound on the dual coefficients.
    pub c: f64,
    /// KKT gap at which optimisation stops.
    pub tol: f64,
    /// Maximum number of pair updates.
    pub max_iter: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self { c: 1.0, tol: 1e-3, max_iter: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub w: Vec<f64>,
    pub b: f64,
    pub alphas: Vec<f64>,
    pub c: f64,
    /// Indexes (0-based, in training order) with `α_i > 0`.
    pub support_indexes: Vec<usize>,
    /// Pair updates performed by the solver.
    pub iterations: usize,
}

impl LinearModel {
    /// Builds a model directly from a weight vector and bias (no dual data).
    pub fn from_weights(w: Vec<f64>, b: f64) -> Self {
        Self { w, b, alphas: Vec::new(), c: 0.0, support_indexes: Vec::new(), iterations: 0 }
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn weight_norm(&self) -> f64 {
        dot(&self.w, &self.w).sqrt()
    }

    /// `⟨w, x⟩ + b`.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.w.len() {
            return Err(Error::DimensionMismatch { expected: self.w.len(), actual: x.len() });
        }
        Ok(dot(&self.w, x) + self.b)
    }

    /// Signed perpendicular distance `f(x) / ‖w‖` to the decision boundary.
    pub fn signed_distance(&self, x: &[f64]) -> Result<f64> {
        let norm = self.weight_norm();
        if norm == 0.0 {
            return Err(Error::DegenerateModel);
        }
        Ok(self.decision_value(x)? / norm)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(sgn(self.decision_value(x)?))
    }

    /// Margin width `2 / ‖w‖`.
    pub fn margin(&self) -> f64 {
        2.0 / self.weight_norm()
    }

    /// Text dump: one `key value...` line each for `w`, `b`, `C` and `support`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "w {}", join(&mut self.w.iter().map(|x| x.to_string())));
        let _ = writeln!(s, "b {}", self.b);
        let _ = writeln!(s, "C {}", self.c);
        let _ = writeln!(s, "support {}", join(&mut self.support_indexes.iter().map(|x| x.to_string())));
        s
    }

    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(self.dump().as_bytes())
    }

    /// Parses the output of [`LinearModel::dump`]. Dual coefficients are not
    /// part of the dump and come back empty.
    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut w = None;
        let mut b = None;
        let mut c = None;
        let mut support = None;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let rest: Vec<&str> = parts.collect();
            let floats = || {
                rest.iter()
                    .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("{key}: {t:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()
            };
            match key {
                "w" => w = Some(floats()?),
                "b" => b = floats()?.first().copied(),
                "C" => c = floats()?.first().copied(),
                "support" => {
                    support = Some(
                        rest.iter()
                            .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("support: {t:?}: {e}"))))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                other => return Err(Error::Parse(format!("unknown model key {other:?}"))),
            }
        }
        let missing = |k: &str| Error::Parse(format!("model dump lacks {k}"));
        Ok(Self {
            w: w.ok_or_else(|| missing("w"))?,
            b: b.ok_or_else(|| missing("b"))?,
            alphas: Vec::new(),
            c: c.ok_or_else(|| missing("C"))?,
            support_indexes: support.ok_or_else(|| missing("support"))?,
            iterations: 0,
        })
    }
}

/// Time-ordered signed distances of a split together with the true labels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreSeries {
    pub scores: Vec<f64>,
    pub truths: Vec<Label>,
}

impl ScoreSeries {
    pub fn new(scores: Vec<f64>, truths: Vec<Label>) -> Result<Self> {
        if scores.len() != truths.len() {
            return Err(Error::LengthMismatch { left: scores.len(), right: truths.len() });
        }
        Ok(Self { scores, truths })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Copy with every score multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { scores: self.scores.iter().map(|r| r * c).collect(), truths: self.truths.clone() }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Training data flattened row-major with labels as `±1.0`.
struct Problem {
    x: Vec<f64>,
    y: Vec<f64>,
    d: usize,
}

impl Problem {
    fn new(train_set: &[LabeledInstance]) -> Result<Self> {
        let first = train_set.first().ok_or(Error::EmptyTrainingSet)?;
        let d = first.features.len();
        let mut x = Vec::with_capacity(d * train_set.len());
        let mut y = Vec::with_capacity(train_set.len());
        for inst in train_set {
            if inst.features.len() != d {
                return Err(Error::DimensionMismatch { expected: d, actual: inst.features.len() });
            }
            x.extend_from_slice(&inst.features);
            y.push(inst.label.value());
        }
        for label in [Label::Normal, Label::Anomalous] {
            if !y.contains(&label.value()) {
                return Err(Error::MissingClass(label));
            }
        }
        Ok(Self { x, y, d })
    }

    fn len(&self) -> usize {
        self.y.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    fn kernel(&self, i: usize, j: usize) -> f64 {
        dot(self.row(i), self.row(j))
    }

    /// Column `i` of `Q` into `out`.
    fn q_column(&self, i: usize, out: &mut [f64]) {
        let xi = self.row(i);
        let yi = self.y[i];
        for (k, q) in out.iter_mut().enumerate() {
            *q = yi * self.y[k] * dot(xi, self.row(k));
        }
    }
}

/// Trains with the default solver settings and box bound `c`.
pub fn train(train_set: &[LabeledInstance], c: f64) -> Result<LinearModel> {
    train_with(train_set, &SvmConfig { c, ..SvmConfig::default() })
}

pub fn train_with(train_set: &[LabeledInstance], config: &SvmConfig) -> Result<LinearModel> {
    if !(config.c > 0.0 && config.c.is_finite()) {
        return Err(Error::InvalidConfig(format!("C = {} must be positive and finite", config.c)));
    }
    if !(config.tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tol = {} must be positive", config.tol)));
    }
    let p = Problem::new(train_set)?;
    let n = p.len();
    let c = config.c;
    let y = &p.y;
    let diag: Vec<f64> = (0..n).map(|i| p.kernel(i, i)).collect();

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut q_i = vec![0.0; n];
    let mut q_j = vec![0.0; n];

    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    let mut iterations = 0usize;
    loop {
        // Maximal violating index from the "up" set.
        let mut g_max = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if in_up(alpha[t], y[t]) {
                let v = -y[t] * grad[t];
                if v > g_max {
                    g_max = v;
                    i_sel = Some(t);
                }
            }
        }
        let mut g_max2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut best_gain = f64::INFINITY;
        if let Some(i) = i_sel {
            p.q_column(i, &mut q_i);
            for t in 0..n {
                if !in_low(alpha[t], y[t]) {
                    continue;
                }
                let yg = y[t] * grad[t];
                if yg > g_max2 {
                    g_max2 = yg;
                }
                let b_it = g_max + yg;
                if b_it > 0.0 {
                    // K_ii + K_tt − 2 K_it, with Q_it = y_i y_t K_it.
                    let mut a_it = diag[i] + diag[t] - 2.0 * y[i] * q_i[t] * y[t];
                    if a_it <= 0.0 {
                        a_it = TAU;
                    }
                    let gain = -(b_it * b_it) / a_it;
                    if gain < best_gain {
                        best_gain = gain;
                        j_sel = Some(t);
                    }
                }
            }
        }
        let gap = g_max + g_max2;
        let (i, j) = match (i_sel, j_sel) {
            (Some(i), Some(j)) if gap > config.tol => (i, j),
            _ => break,
        };
        if iterations >= config.max_iter {
            return Err(Error::NotConverged { iterations, gap });
        }
        iterations += 1;

        p.q_column(j, &mut q_j);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let mut quad = diag[i] + diag[j] + 2.0 * q_i[j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = diag[i] + diag[j] - 2.0 * q_i[j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (d_i, d_j) = (alpha[i] - old_i, alpha[j] - old_j);
        for k in 0..n {
            grad[k] += q_i[k] * d_i + q_j[k] * d_j;
        }
    }

    // Bias from the free support vectors; without any, the midpoint of the
    // interval allowed by the bounded ones.
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut n_free = 0usize;
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            n_free += 1;
            free_sum += yg;
        }
    }
    let rho = if n_free > 0 { free_sum / n_free as f64 } else { (upper + lower) / 2.0 };

    let mut w = vec![0.0; p.d];
    for t in 0..n {
        if alpha[t] > 0.0 {
            for (wk, xk) in w.iter_mut().zip(p.row(t)) {
                *wk += alpha[t] * y[t] * xk;
            }
        }
    }
    let support_indexes = (0..n).filter(|&t| alpha[t] > 0.0).collect();
    Ok(LinearModel { w, b: -rho, alphas: alpha, c, support_indexes, iterations })
}

/// `L_D = Σα_i − ½ Σ_ij α_i α_j y_i y_j ⟨x_i, x_j⟩`.
pub fn dual_objective(alphas: &[f64], train_set: &[LabeledInstance]) -> f64 {
    let mut w = vec![0.0; train_set.first().map_or(0, |i| i.features.len())];
    for (a, inst) in alphas.iter().zip(train_set) {
        for (wk, xk) in w.iter_mut().zip(&inst.features) {
            *wk += a * inst.label.value() * xk;
        }
    }
    alphas.iter().sum::<f64>() - 0.5 * dot(&w, &w)
}

/// Primal soft-margin objective `½‖w‖² + C Σ max(0, 1 − y_i f(x_i))`.
pub fn primal_objective(model: &LinearModel, c: f64, train_set: &[LabeledInstance]) -> Result<f64> {
    let mut hinge = 0.0;
    for inst in train_set {
        hinge += (1.0 - inst.label.value() * model.decision_value(&inst.features)?).max(0.0);
    }
    Ok(0.5 * dot(&model.w, &model.w) + c * hinge)
}

/// Largest KKT violation of a trained model on its training set.
///
/// For `α_i = 0` the violation is `max(0, 1 − y_i f_i)`, for `α_i = C` it is
/// `max(0, y_i f_i − 1)` and for free coefficients `|y_i f_i − 1|`.
pub fn max_kkt_violation(model: &LinearModel, train_set: &[LabeledInstance]) -> Result<f64> {
    if model.alphas.len() != train_set.len() {
        return Err(Error::LengthMismatch { left: model.alphas.len(), right: train_set.len() });
    }
    let mut worst: f64 = 0.0;
    for (a, inst) in model.alphas.iter().zip(train_set) {
        let margin = inst.label.value() * model.decision_value(&inst.features)?;
        let v = if *a <= 0.0 {
            (1.0 - margin).max(0.0)
        } else if *a >= model.c {
            (margin - 1.0).max(0.0)
        } else {
            (margin - 1.0).abs()
        };
        worst = worst.max(v);
    }
    Ok(worst)
}

/// Signed distances of `test_set` in time order.
pub fn score_series(model: &LinearModel, test_set: &[LabeledInstance]) -> Result<ScoreSeries> {
    let scores = test_set.iter().map(|inst| model.signed_distance(&inst.features)).collect::<Result<Vec<_>>>()?;
    let truths = test_set.iter().map(|i| i.label).collect();
    Ok(ScoreSeries { scores, truths })
}
