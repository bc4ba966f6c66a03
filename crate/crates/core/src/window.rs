//! Static and dynamic moving-window post-filters over a [`ScoreSeries`].
//!
//! Both filters partition the series into disjoint contiguous windows and
//! label every instance with the sign of its window's score sum. Static
//! windows have a fixed width `α`; dynamic windows grow greedily until the
//! cumulative `|r_i|` would exceed a threshold `β`. A score larger than `β`
//! on its own forms a singleton window, and a new window starts right after
//! the previous one ends.
//!
//! Windows are 0-based half-open ranges.

use std::fmt;
use std::io::Write;
use std::ops::Range;

use crate::svm::ScoreSeries;
use crate::{sgn, Error, Label, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSizeGrid {
    sizes: Vec<usize>,
}

impl WindowSizeGrid {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidConfig("window size grid is empty".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidConfig("window sizes must be at least 1".into()));
        }
        Ok(Self { sizes })
    }

    /// `{1, 2, ..., m}`.
    pub fn up_to(m: usize) -> Result<Self> {
        Self::new((1..=m).collect())
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGrid {
    thresholds: Vec<f64>,
    lambda: f64,
}

impl ThresholdGrid {
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// `β_l = max_i |r_i| · (l/m) · λ` for `l = 1..=m`.
pub fn make_threshold_grid(s: &ScoreSeries, m: usize, lambda: f64) -> Result<ThresholdGrid> {
    if s.is_empty() {
        return Err(Error::InvalidConfig("cannot build a threshold grid from an empty series".into()));
    }
    if m == 0 {
        return Err(Error::InvalidConfig("threshold grid needs m >= 1".into()));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!("lambda = {lambda} must be positive")));
    }
    let max_abs = s.scores.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
    if max_abs == 0.0 {
        return Err(Error::DegenerateGrid);
    }
    let thresholds = (1..=m).map(|l| max_abs * (l as f64 / m as f64) * lambda).collect();
    Ok(ThresholdGrid { thresholds, lambda })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowPartition {
    pub windows: Vec<Range<usize>>,
}

impl WindowPartition {
    /// Whether the windows are non-empty, contiguous and cover exactly `0..n`.
    pub fn is_partition_of(&self, n: usize) -> bool {
        let mut next = 0;
        for w in &self.windows {
            if w.start != next || w.end <= w.start {
                return false;
            }
            next = w.end;
        }
        next == n
    }

    /// Labels every instance with the sign of its window's score sum.
    pub fn label(&self, scores: &[f64]) -> Vec<Label> {
        let mut labels = Vec::with_capacity(scores.len());
        for w in &self.windows {
            let sum: f64 = scores[w.clone()].iter().sum();
            let l = sgn(sum);
            labels.extend(std::iter::repeat_n(l, w.len()));
        }
        labels
    }
}

/// Windows `[kα, min((k+1)α, n))` for `k = 0..⌈n/α⌉`.
pub fn static_partition(n: usize, alpha: usize) -> Result<WindowPartition> {
    if alpha == 0 {
        return Err(Error::InvalidConfig("window size must be at least 1".into()));
    }
    let windows = (0..n.div_ceil(alpha)).map(|k| k * alpha..((k + 1) * alpha).min(n)).collect();
    Ok(WindowPartition { windows })
}

pub fn static_label(s: &ScoreSeries, alpha: usize) -> Result<Vec<Label>> {
    Ok(static_partition(s.len(), alpha)?.label(&s.scores))
}

pub fn dynamic_partition(s: &ScoreSeries, beta: f64) -> Result<WindowPartition> {
    if !(beta > 0.0) {
        return Err(Error::InvalidConfig(format!("threshold beta = {beta} must be positive")));
    }
    let n = s.len();
    let mut windows = Vec::new();
    let mut start = 0;
    while start < n {
        let mut acc = s.scores[start].abs();
        let mut end = start + 1;
        while end < n {
            let next = acc + s.scores[end].abs();
            if next > beta {
                break;
            }
            acc = next;
            end += 1;
        }
        windows.push(start..end);
        start = end;
    }
    Ok(WindowPartition { windows })
}

pub fn dynamic_label(s: &ScoreSeries, beta: f64) -> Result<Vec<Label>> {
    Ok(dynamic_partition(s, beta)?.label(&s.scores))
}

/// `(1/n) Σ (c_i − y_i)²`, i.e. four times the mismatch fraction.
pub fn window_error(labels: &[Label], truths: &[Label]) -> Result<f64> {
    if labels.len() != truths.len() {
        return Err(Error::LengthMismatch { left: labels.len(), right: truths.len() });
    }
    if labels.is_empty() {
        return Ok(0.0);
    }
    let sq: f64 = labels.iter().zip(truths).map(|(c, y)| (c.value() - y.value()).powi(2)).sum();
    Ok(sq / labels.len() as f64)
}

/// Fraction of mismatching labels.
pub fn error_rate(labels: &[Label], truths: &[Label]) -> Result<f64> {
    if labels.len() != truths.len() {
        return Err(Error::LengthMismatch { left: labels.len(), right: truths.len() });
    }
    if labels.is_empty() {
        return Ok(0.0);
    }
    let wrong = labels.iter().zip(truths).filter(|(c, y)| c != y).count();
    Ok(wrong as f64 / labels.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterParam {
    Static { alpha: usize },
    Dynamic { beta: f64 },
}

impl FilterParam {
    pub fn kind(&self) -> &'static str {
        match self {
            FilterParam::Static { .. } => "static",
            FilterParam::Dynamic { .. } => "dynamic",
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            FilterParam::Static { alpha } => alpha as f64,
            FilterParam::Dynamic { beta } => beta,
        }
    }
}

impl fmt::Display for FilterParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterParam::Static { alpha } => write!(f, "{alpha}"),
            FilterParam::Dynamic { beta } => write!(f, "{beta}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunedFilter {
    pub param: FilterParam,
    /// `window_error` of the chosen parameter on the tuning series.
    pub training_error: f64,
}

impl TunedFilter {
    pub fn apply(&self, s: &ScoreSeries) -> Result<Vec<Label>> {
        apply(self, s)
    }
}

/// First grid element with the lowest error; the grids are increasing so
/// this is the smallest minimiser.
fn argmin<T: Copy>(candidates: impl Iterator<Item = Result<(T, f64)>>) -> Result<(T, f64)> {
    let mut best: Option<(T, f64)> = None;
    for c in candidates {
        let (p, e) = c?;
        match best {
            Some((_, be)) if e >= be => {}
            _ => best = Some((p, e)),
        }
    }
    best.ok_or_else(|| Error::InvalidConfig("empty tuning grid".into()))
}

pub fn tune_static(s: &ScoreSeries, grid: &WindowSizeGrid) -> Result<TunedFilter> {
    let mut sizes = grid.sizes().to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let (alpha, training_error) =
        argmin(sizes.into_iter().map(|a| Ok((a, window_error(&static_label(s, a)?, &s.truths)?))))?;
    Ok(TunedFilter { param: FilterParam::Static { alpha }, training_error })
}

pub fn tune_dynamic(s: &ScoreSeries, grid: &ThresholdGrid) -> Result<TunedFilter> {
    let (beta, training_error) =
        argmin(grid.thresholds().iter().map(|&b| Ok((b, window_error(&dynamic_label(s, b)?, &s.truths)?))))?;
    Ok(TunedFilter { param: FilterParam::Dynamic { beta }, training_error })
}

pub fn apply(filter: &TunedFilter, s: &ScoreSeries) -> Result<Vec<Label>> {
    match filter.param {
        FilterParam::Static { alpha } => static_label(s, alpha),
        FilterParam::Dynamic { beta } => dynamic_label(s, beta),
    }
}

/// Writes `kind,parameter,training_error` rows.
pub fn write_tuned_filters<W: Write>(out: W, filters: &[TunedFilter]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "parameter", "training_error"])?;
    for f in filters {
        w.write_record([f.param.kind().to_string(), f.param.to_string(), f.training_error.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
