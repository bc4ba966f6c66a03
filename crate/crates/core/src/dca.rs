//! Detection phase of the deterministic Dendritic Cell Algorithm.
//!
//! Two features are min-max normalised and mapped to a safe and a danger
//! signal by their correlation with the anomaly label. Each instance yields
//! a costimulation value `csm = s + d` and a context value `k = d − w·s`.
//! The reference dDCA uses `w = 2`; the default here is `w = 1`, which puts
//! the zero of `k` at the midpoint between the normalised classes.
//! Every cell in the population reads the whole stream, accumulating both;
//! once its `csm` sum reaches its lifespan it presents, voting its `k` sum
//! on every instance sampled since its last reset, and starts over. Partial
//! windows are flushed as a final presentation at end of input. An instance
//! is anomalous when the mean of the votes it received is non-negative.
//!
//! Instances are their own antigen; there is no antigen attribution phase.

use std::io::Write;

use crate::datagen::LabeledInstance;
use crate::window::WindowPartition;
use crate::{sgn, Error, Label, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Signal {
    pub safe: f64,
    pub danger: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalMapping {
    pub mins: [f64; 2],
    pub maxs: [f64; 2],
    /// Pearson correlation of each normalised feature with the label.
    pub correlations: [f64; 2],
    pub danger_feature: usize,
    pub safe_feature: usize,
    /// Whether the safe signal is `1 − x` rather than `x`.
    pub safe_inverted: bool,
}

impl SignalMapping {
    pub fn normalise(&self, feature: usize, x: f64) -> f64 {
        (x - self.mins[feature]) / (self.maxs[feature] - self.mins[feature])
    }

    pub fn signal(&self, features: &[f64]) -> Signal {
        let danger = self.normalise(self.danger_feature, features[self.danger_feature]);
        let safe = self.normalise(self.safe_feature, features[self.safe_feature]);
        Signal { safe: if self.safe_inverted { 1.0 - safe } else { safe }, danger }
    }
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// Builds the signal mapping from `set` (bounds and correlations both come
/// from it) and returns the mapped signal series.
pub fn preprocess(set: &[LabeledInstance]) -> Result<(SignalMapping, Vec<Signal>)> {
    let first = set.first().ok_or(Error::EmptyTrainingSet)?;
    if first.features.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, actual: first.features.len() });
    }
    if let Some(bad) = set.iter().find(|i| i.features.len() != 2) {
        return Err(Error::DimensionMismatch { expected: 2, actual: bad.features.len() });
    }
    for label in [Label::Normal, Label::Anomalous] {
        if !set.iter().any(|i| i.label == label) {
            return Err(Error::MissingClass(label));
        }
    }

    let mut mins = [f64::INFINITY; 2];
    let mut maxs = [f64::NEG_INFINITY; 2];
    for inst in set {
        for j in 0..2 {
            mins[j] = mins[j].min(inst.features[j]);
            maxs[j] = maxs[j].max(inst.features[j]);
        }
    }
    for j in 0..2 {
        if !(maxs[j] > mins[j]) {
            return Err(Error::ConstantFeature(j));
        }
    }

    let labels: Vec<f64> = set.iter().map(|i| i.label.value()).collect();
    let mut correlations = [0.0; 2];
    for (j, corr) in correlations.iter_mut().enumerate() {
        let normed: Vec<f64> = set.iter().map(|i| (i.features[j] - mins[j]) / (maxs[j] - mins[j])).collect();
        *corr = pearson(&normed, &labels);
    }
    let danger_feature = if correlations[1] > correlations[0] { 1 } else { 0 };
    let safe_feature = 1 - danger_feature;
    let mapping = SignalMapping {
        mins,
        maxs,
        correlations,
        danger_feature,
        safe_feature,
        safe_inverted: correlations[safe_feature] > 0.0,
    };
    let signals = set.iter().map(|i| mapping.signal(&i.features)).collect();
    Ok((mapping, signals))
}

/// Safe-signal weight of the reference deterministic DCA.
pub const DDCA_SAFE_WEIGHT: f64 = 2.0;
/// Equal weighting of the two signals.
pub const BALANCED_SAFE_WEIGHT: f64 = 1.0;

/// `(csm, k) = (s + d, d − w·s)`.
pub fn signal_transform(safe: f64, danger: f64, safe_weight: f64) -> (f64, f64) {
    (safe + danger, danger - safe_weight * safe)
}

/// `lifespan_l = max_i csm_i · (l/m) · λ` for `l = 1..=m`.
pub fn init_lifespans(signals: &[Signal], m: usize, lambda: f64) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidConfig("population size must be at least 1".into()));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!("lambda = {lambda} must be positive")));
    }
    let max_csm = signals.iter().map(|s| s.safe + s.danger).fold(0.0f64, f64::max);
    if max_csm == 0.0 {
        return Err(Error::DegenerateSignals);
    }
    Ok((1..=m).map(|l| max_csm * (l as f64 / m as f64) * lambda).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DendriticCell {
    pub lifespan: f64,
    pub csm_sum: f64,
    pub k_sum: f64,
    /// First instance sampled since the last presentation.
    pub window_start: usize,
}

impl DendriticCell {
    pub fn new(lifespan: f64) -> Self {
        Self { lifespan, csm_sum: 0.0, k_sum: 0.0, window_start: 0 }
    }

    /// Samples instance `index`. Returns the presented window and its `k`
    /// sum when the lifespan is reached.
    pub fn sample(&mut self, index: usize, csm: f64, k: f64) -> Option<(std::ops::Range<usize>, f64)> {
        self.csm_sum += csm;
        self.k_sum += k;
        if self.csm_sum >= self.lifespan {
            Some(self.present(index + 1))
        } else {
            None
        }
    }

    /// Presents `window_start..end` and resets.
    fn present(&mut self, end: usize) -> (std::ops::Range<usize>, f64) {
        let out = (self.window_start..end, self.k_sum);
        self.csm_sum = 0.0;
        self.k_sum = 0.0;
        self.window_start = end;
        out
    }

    /// End-of-input presentation of a partial window, if any.
    pub fn flush(&mut self, n: usize) -> Option<(std::ops::Range<usize>, f64)> {
        (self.window_start < n).then(|| self.present(n))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcaPopulation {
    pub cells: Vec<DendriticCell>,
    pub safe_weight: f64,
}

impl DcaPopulation {
    pub fn new(lifespans: &[f64], safe_weight: f64) -> Result<Self> {
        if !(safe_weight >= 0.0 && safe_weight.is_finite()) {
            return Err(Error::InvalidConfig(format!("safe weight {safe_weight} must be finite and non-negative")));
        }
        if lifespans.is_empty() {
            return Err(Error::EmptyPopulation);
        }
        if lifespans.iter().any(|l| !(*l > 0.0)) {
            return Err(Error::InvalidConfig("lifespans must be positive".into()));
        }
        if lifespans.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("lifespans must be strictly increasing".into()));
        }
        Ok(Self { cells: lifespans.iter().map(|&l| DendriticCell::new(l)).collect(), safe_weight })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcaOutput {
    pub mean_votes: Vec<f64>,
    pub vote_counts: Vec<usize>,
    pub labels: Vec<Label>,
}

/// Presentation windows of a single cell of the given lifespan.
pub fn presentation_windows(signals: &[Signal], lifespan: f64) -> WindowPartition {
    let mut cell = DendriticCell::new(lifespan);
    let mut windows = Vec::new();
    for (i, s) in signals.iter().enumerate() {
        if let Some((w, _)) = cell.sample(i, s.safe + s.danger, 0.0) {
            windows.push(w);
        }
    }
    windows.extend(cell.flush(signals.len()).map(|(w, _)| w));
    WindowPartition { windows }
}

pub fn run_dca(signals: &[Signal], population: &DcaPopulation) -> Result<DcaOutput> {
    if population.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let n = signals.len();
    let transformed: Vec<(f64, f64)> =
        signals.iter().map(|s| signal_transform(s.safe, s.danger, population.safe_weight)).collect();
    let mut vote_sums = vec![0.0; n];
    let mut vote_counts = vec![0usize; n];
    let mut record = |(window, k_sum): (std::ops::Range<usize>, f64)| {
        for t in window {
            vote_sums[t] += k_sum;
            vote_counts[t] += 1;
        }
    };
    for template in &population.cells {
        let mut cell = DendriticCell::new(template.lifespan);
        for (i, &(csm, k)) in transformed.iter().enumerate() {
            if let Some(p) = cell.sample(i, csm, k) {
                record(p);
            }
        }
        if let Some(p) = cell.flush(n) {
            record(p);
        }
    }
    let mean_votes: Vec<f64> = vote_sums.iter().zip(&vote_counts).map(|(s, &c)| s / c as f64).collect();
    let labels = mean_votes.iter().map(|&v| sgn(v)).collect();
    Ok(DcaOutput { mean_votes, vote_counts, labels })
}

/// Preprocesses `set`, builds `m` lifespans scaled by `lambda` and runs the
/// population over it.
pub fn detect(set: &[LabeledInstance], m: usize, lambda: f64, safe_weight: f64) -> Result<DcaOutput> {
    let (_, signals) = preprocess(set)?;
    let lifespans = init_lifespans(&signals, m, lambda)?;
    run_dca(&signals, &DcaPopulation::new(&lifespans, safe_weight)?)
}

/// Writes `time_index,mean_vote,label` rows (1-based time index).
pub fn write_scores<W: Write>(out: W, output: &DcaOutput) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time_index", "mean_vote", "label"])?;
    for (i, (v, l)) in output.mean_votes.iter().zip(&output.labels).enumerate() {
        w.write_record([(i + 1).to_string(), v.to_string(), l.as_i8().to_string()])?;
    }
    w.flush()?;
    Ok(())
}
