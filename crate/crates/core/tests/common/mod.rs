#![allow(dead_code, clippy::needless_range_loop)]

use dcabench::datagen::LabeledInstance;
use dcabench::svm::ScoreSeries;
use dcabench::Label;
use num_complex::Complex64;

pub fn inst(x: &[f64], label: i8, t: usize) -> LabeledInstance {
    LabeledInstance { features: x.to_vec(), label: Label::from_i8(label).unwrap(), time_index: t }
}

pub fn four_points() -> Vec<LabeledInstance> {
    vec![inst(&[0.0, 0.0], -1, 1), inst(&[0.0, 1.0], -1, 2), inst(&[2.0, 0.0], 1, 3), inst(&[2.0, 1.0], 1, 4)]
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub alphas: Vec<f64>,
    pub w: Vec<f64>,
    pub b: f64,
    pub dual: f64,
}

/// Solves `A x = rhs` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for k in col..n {
                a[r][k] -= f * a[col][k];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (rhs[r] - s) / a[r][r];
    }
    Some(x)
}

/// Brute-force soft-margin dual: every assignment of each coefficient to
/// {0, free, C}, the free block solved from the KKT equalities, kept if
/// primal and dual feasible. Returns the feasible point with the largest
/// dual objective.
pub fn qp_oracle(set: &[LabeledInstance], c: f64) -> Option<QpSolution> {
    let n = set.len();
    let y: Vec<f64> = set.iter().map(|i| i.label.value()).collect();
    let dot = |i: usize, j: usize| -> f64 { set[i].features.iter().zip(&set[j].features).map(|(a, b)| a * b).sum() };
    let q = |i: usize, j: usize| y[i] * y[j] * dot(i, j);
    let mut best: Option<QpSolution> = None;
    for code in 0..3usize.pow(n as u32) {
        let mut state = vec![0u8; n];
        let mut rest = code;
        for s in state.iter_mut() {
            *s = (rest % 3) as u8;
            rest /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 1).collect();
        let upper: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut alphas = vec![0.0; n];
        for &u in &upper {
            alphas[u] = c;
        }
        // Unknowns: α_F then b.
        let k = free.len();
        let mut a = vec![vec![0.0; k + 1]; k + 1];
        let mut rhs = vec![0.0; k + 1];
        for (r, &i) in free.iter().enumerate() {
            for (s, &j) in free.iter().enumerate() {
                a[r][s] = q(i, j);
            }
            a[r][k] = y[i];
            rhs[r] = 1.0 - upper.iter().map(|&u| q(i, u) * c).sum::<f64>();
        }
        for (s, &j) in free.iter().enumerate() {
            a[k][s] = y[j];
        }
        rhs[k] = -upper.iter().map(|&u| y[u] * c).sum::<f64>();
        let b = if k == 0 {
            // No free coefficient: b is only bounded; take the midpoint of
            // the feasible interval below.
            if rhs[k].abs() > 1e-9 {
                continue;
            }
            f64::NAN
        } else {
            let Some(x) = solve(a, rhs) else { continue };
            for (s, &j) in free.iter().enumerate() {
                alphas[j] = x[s];
            }
            x[k]
        };
        if free.iter().any(|&j| alphas[j] < -1e-9 || alphas[j] > c + 1e-9) {
            continue;
        }
        let dim = set[0].features.len();
        let mut w = vec![0.0; dim];
        for i in 0..n {
            for d in 0..dim {
                w[d] += alphas[i] * y[i] * set[i].features[d];
            }
        }
        let f_no_b = |i: usize| -> f64 { w.iter().zip(&set[i].features).map(|(a, b)| a * b).sum() };
        let b = if b.is_nan() {
            // y f ≥ 1 on the zero set and ≤ 1 on the bound set.
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for i in 0..n {
                let g = f_no_b(i);
                let at_zero = state[i] == 0;
                if (y[i] > 0.0) == at_zero {
                    lo = lo.max(1.0 / y[i] - g);
                } else {
                    hi = hi.min(1.0 / y[i] - g);
                }
            }
            if lo > hi + 1e-9 {
                continue;
            }
            if lo.is_finite() && hi.is_finite() {
                (lo + hi) / 2.0
            } else if lo.is_finite() {
                lo
            } else {
                hi
            }
        } else {
            b
        };
        let ok = (0..n).all(|i| {
            let m = y[i] * (f_no_b(i) + b);
            match state[i] {
                0 => m >= 1.0 - 1e-9,
                2 => m <= 1.0 + 1e-9,
                _ => true,
            }
        });
        if !ok {
            continue;
        }
        let dual = alphas.iter().sum::<f64>() - 0.5 * w.iter().map(|v| v * v).sum::<f64>();
        if best.as_ref().is_none_or(|s| dual > s.dual) {
            best = Some(QpSolution { alphas, w, b, dual });
        }
    }
    best
}

fn sign_label(sum: f64) -> Label {
    if sum >= 0.0 {
        Label::Anomalous
    } else {
        Label::Normal
    }
}

/// Each instance labelled by the sign of the sum over the block `⌊i/α⌋`.
pub fn brute_static(scores: &[f64], alpha: usize) -> Vec<Label> {
    (0..scores.len())
        .map(|i| {
            let block = i / alpha;
            let sum: f64 = (0..scores.len()).filter(|j| j / alpha == block).map(|j| scores[j]).sum();
            sign_label(sum)
        })
        .collect()
}

/// Window boundaries recomputed from scratch: each window is the longest
/// run from its start whose absolute sum is within `beta`, at least one long.
pub fn brute_dynamic_windows(scores: &[f64], beta: f64) -> Vec<(usize, usize)> {
    let n = scores.len();
    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        for e in start + 2..=n {
            let total: f64 = scores[start..e].iter().map(|r| r.abs()).sum();
            if total <= beta {
                end = e;
            } else {
                break;
            }
        }
        out.push((start, end));
        start = end;
    }
    out
}

pub fn brute_dynamic(scores: &[f64], beta: f64) -> Vec<Label> {
    let mut labels = Vec::new();
    for (s, e) in brute_dynamic_windows(scores, beta) {
        let sum: f64 = scores[s..e].iter().sum();
        labels.extend(std::iter::repeat_n(sign_label(sum), e - s));
    }
    labels
}

fn mismatches(a: &[Label], b: &[Label]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Smallest α in `1..=m` with the fewest mismatches.
pub fn brute_tune_static(s: &ScoreSeries, m: usize) -> (usize, usize) {
    (1..=m).map(|a| (a, mismatches(&brute_static(&s.scores, a), &s.truths))).min_by_key(|&(a, e)| (e, a)).unwrap()
}

/// Index into the threshold list of the first threshold with the fewest
/// mismatches.
pub fn brute_tune_dynamic(s: &ScoreSeries, thresholds: &[f64]) -> (usize, usize) {
    thresholds
        .iter()
        .enumerate()
        .map(|(l, &b)| (l, mismatches(&brute_dynamic(&s.scores, b), &s.truths)))
        .min_by_key(|&(l, e)| (e, l))
        .unwrap()
}

/// Kahan-compensated complex sum.
fn kahan(terms: impl Iterator<Item = Complex64>) -> Complex64 {
    let (mut sum, mut comp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for t in terms {
        let y = t - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    sum
}

/// `G_D` with `e^{−j2πbg} = 1` removed exactly, summed with compensation.
pub fn dc_gain_oracle(w: usize, omega: f64) -> Complex64 {
    let inner = kahan((0..w).map(|b| Complex64::from_polar(1.0, -(b as f64) * omega)));
    inner * w as f64 / (w * w) as f64
}
