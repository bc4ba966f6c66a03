//! End-to-end experiment: generate the suite, run every method on every
//! dataset, analyse the error rates and write the results.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::datagen::{self, Dataset, GeneratorConfig};
use crate::svm::{self, LinearModel, ScoreSeries, SvmConfig};
use crate::window::{self, FilterParam, WindowSizeGrid};
use crate::{dca, Error, Result};

mod analysis;
mod config;
mod output;

pub use analysis::{analyze, AnalysisReport, PairOutcome, PoolAnalysis, TestOutcome};
pub use config::parse_methods;
pub use output::{
    emit_outputs, read_error_rates, write_error_rates, write_gain_file, write_stats_report, write_summary, OutputFiles,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodId {
    /// Unfiltered linear classifier.
    Lnc,
    /// Classifier with a tuned static moving window.
    Smov,
    /// Classifier with a tuned dynamic moving window, low λ.
    Dmov1,
    /// Classifier with a tuned dynamic moving window, high λ.
    Dmov2,
    /// Dendritic cell population, low λ.
    Dca1,
    /// Dendritic cell population, high λ.
    Dca2,
}

impl MethodId {
    pub const ALL: [MethodId; 6] =
        [MethodId::Lnc, MethodId::Smov, MethodId::Dmov1, MethodId::Dmov2, MethodId::Dca1, MethodId::Dca2];

    pub fn name(self) -> &'static str {
        match self {
            MethodId::Lnc => "LNC",
            MethodId::Smov => "SMOV",
            MethodId::Dmov1 => "DMOV1",
            MethodId::Dmov2 => "DMOV2",
            MethodId::Dca1 => "DCA1",
            MethodId::Dca2 => "DCA2",
        }
    }

    pub fn uses_classifier(self) -> bool {
        !matches!(self, MethodId::Dca1 | MethodId::Dca2)
    }

    /// Methods that are parameterisations of the same algorithm share a family.
    pub fn family(self) -> &'static str {
        match self {
            MethodId::Lnc => "LNC",
            MethodId::Smov => "SMOV",
            MethodId::Dmov1 | MethodId::Dmov2 => "DMOV",
            MethodId::Dca1 | MethodId::Dca2 => "DCA",
        }
    }

    /// λ for the methods that take one.
    pub fn lambda(self, config: &ExperimentConfig) -> Option<f64> {
        match self {
            MethodId::Dmov1 | MethodId::Dca1 => Some(config.lambda_low),
            MethodId::Dmov2 | MethodId::Dca2 => Some(config.lambda_high),
            _ => None,
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodId::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub n_datasets: usize,
    pub methods: Vec<MethodId>,
    /// `|A|`: static window sizes `1..=window_grid`.
    pub window_grid: usize,
    /// `|B|`: dynamic thresholds, also the dendritic cell population size.
    pub threshold_grid: usize,
    pub svm: SvmConfig,
    pub lambda_low: f64,
    pub lambda_high: f64,
    /// Weight of the safe signal in the dendritic cell context value.
    pub dca_safe_weight: f64,
    /// Generator settings; `class2_mean` is the top of the sweep.
    pub generator: GeneratorConfig,
    pub suite_name: String,
    pub output_dir: PathBuf,
    pub sweep_widths: Vec<usize>,
    pub sweep_points: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 20110701,
            n_datasets: 100,
            methods: MethodId::ALL.to_vec(),
            window_grid: 100,
            threshold_grid: 100,
            svm: SvmConfig::default(),
            lambda_low: 1.0,
            lambda_high: 100.0,
            dca_safe_weight: dca::BALANCED_SAFE_WEIGHT,
            generator: GeneratorConfig::default(),
            suite_name: "synthetic".into(),
            output_dir: PathBuf::from("results"),
            sweep_widths: vec![2, 4, 8],
            sweep_points: 65,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("method list is empty".into()));
        }
        if self.n_datasets < 2 {
            return Err(Error::InvalidConfig(format!("n_datasets = {} must be at least 2", self.n_datasets)));
        }
        if self.window_grid == 0 || self.threshold_grid == 0 {
            return Err(Error::InvalidConfig("grid sizes must be at least 1".into()));
        }
        if !(self.lambda_low > 0.0 && self.lambda_high > 0.0) {
            return Err(Error::InvalidConfig("lambda values must be positive".into()));
        }
        if !(self.dca_safe_weight >= 0.0 && self.dca_safe_weight.is_finite()) {
            return Err(Error::InvalidConfig("dca_safe_weight must be finite and non-negative".into()));
        }
        if self.sweep_points < 2 || self.sweep_widths.contains(&0) {
            return Err(Error::InvalidConfig("gain sweeps need >= 2 points and widths >= 1".into()));
        }
        self.generator.validate()
    }

    pub fn dataset_config(&self, index: usize) -> GeneratorConfig {
        datagen::suite_member_config(&self.generator, self.n_datasets, self.seed, index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodResult {
    pub error_rate: f64,
    pub tuned_parameter: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub dataset_index: usize,
    pub centroid_distance: f64,
    pub method: MethodId,
    pub error_rate: f64,
    pub tuned_parameter: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultsTable {
    pub rows: Vec<ResultRow>,
}

impl ResultsTable {
    /// Methods present, in first-appearance order.
    pub fn methods(&self) -> Vec<MethodId> {
        let mut out = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.method) {
                out.push(r.method);
            }
        }
        out
    }

    /// Dataset indexes present, ascending.
    pub fn dataset_indexes(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self.rows.iter().map(|r| r.dataset_index).collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }

    pub fn get(&self, dataset_index: usize, method: MethodId) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.dataset_index == dataset_index && r.method == method)
    }

    /// Error rates of `method` ordered by dataset index.
    pub fn errors(&self, method: MethodId) -> Vec<f64> {
        let mut rows: Vec<&ResultRow> = self.rows.iter().filter(|r| r.method == method).collect();
        rows.sort_by_key(|r| r.dataset_index);
        rows.into_iter().map(|r| r.error_rate).collect()
    }

    pub fn centroid_distance(&self, dataset_index: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.dataset_index == dataset_index).map(|r| r.centroid_distance)
    }
}

/// Classifier trained on the training split with its score series on both
/// splits.
struct Scored {
    train: ScoreSeries,
    test: ScoreSeries,
}

fn score_dataset(d: &Dataset, svm_config: &SvmConfig) -> Result<(LinearModel, Scored)> {
    let model = svm::train_with(&d.train, svm_config)?;
    let train = svm::score_series(&model, &d.train)?;
    let test = svm::score_series(&model, &d.test)?;
    Ok((model, Scored { train, test }))
}

fn run_scored(
    method: MethodId,
    d: &Dataset,
    scored: Option<&Scored>,
    config: &ExperimentConfig,
) -> Result<MethodResult> {
    let truths: Vec<_> = d.test.iter().map(|i| i.label).collect();
    let scored = || scored.ok_or_else(|| Error::InvalidConfig("classifier scores missing".into()));
    let (labels, tuned) = match method {
        MethodId::Lnc => {
            let s = scored()?;
            (s.test.scores.iter().map(|&r| crate::sgn(r)).collect(), None)
        }
        MethodId::Smov => {
            let s = scored()?;
            let f = window::tune_static(&s.train, &WindowSizeGrid::up_to(config.window_grid)?)?;
            (f.apply(&s.test)?, Some(f.param))
        }
        MethodId::Dmov1 | MethodId::Dmov2 => {
            let s = scored()?;
            let lambda = method.lambda(config).expect("dynamic methods take lambda");
            let grid = window::make_threshold_grid(&s.train, config.threshold_grid, lambda)?;
            let f = window::tune_dynamic(&s.train, &grid)?;
            (f.apply(&s.test)?, Some(f.param))
        }
        MethodId::Dca1 | MethodId::Dca2 => {
            let lambda = method.lambda(config).expect("dca methods take lambda");
            (dca::detect(&d.test, config.threshold_grid, lambda, config.dca_safe_weight)?.labels, None)
        }
    };
    Ok(MethodResult {
        error_rate: window::error_rate(&labels, &truths)?,
        tuned_parameter: tuned.map(|p: FilterParam| p.value()),
    })
}

/// Runs one method on one dataset. The classifier is trained here; use
/// [`run_dataset`] to share it between methods.
pub fn run_method(method: MethodId, d: &Dataset, config: &ExperimentConfig) -> Result<MethodResult> {
    let scored = if method.uses_classifier() { Some(score_dataset(d, &config.svm)?.1) } else { None };
    run_scored(method, d, scored.as_ref(), config)
}

/// Runs every configured method on dataset `index`, training the classifier
/// once.
pub fn run_dataset(index: usize, d: &Dataset, config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let wrap = |method: MethodId| move |e: Error| Error::Method { method, dataset: index, source: Box::new(e) };
    let first_svm = config.methods.iter().copied().find(|m| m.uses_classifier());
    let scored = match first_svm {
        Some(m) => Some(score_dataset(d, &config.svm).map_err(wrap(m))?.1),
        None => None,
    };
    let distance = datagen::centroid_distance(d)?;
    config
        .methods
        .iter()
        .map(|&method| {
            let r = run_scored(method, d, scored.as_ref(), config).map_err(wrap(method))?;
            Ok(ResultRow {
                dataset_index: index,
                centroid_distance: distance,
                method,
                error_rate: r.error_rate,
                tuned_parameter: r.tuned_parameter,
            })
        })
        .collect()
}

/// Generates each dataset and runs every method on it. Datasets are processed
/// in parallel and the rows are ordered by dataset index, then method order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultsTable> {
    config.validate()?;
    let per_dataset: Vec<Vec<ResultRow>> = (0..config.n_datasets)
        .into_par_iter()
        .map(|k| {
            let d = datagen::generate_dataset(&config.dataset_config(k))?;
            run_dataset(k, &d, config)
        })
        .collect::<Result<_>>()?;
    Ok(ResultsTable { rows: per_dataset.into_iter().flatten().collect() })
}

/// Classifier models for every dataset of the suite, in index order.
pub fn train_suite_models(config: &ExperimentConfig) -> Result<Vec<(Dataset, LinearModel)>> {
    config.validate()?;
    (0..config.n_datasets)
        .into_par_iter()
        .map(|k| {
            let d = datagen::generate_dataset(&config.dataset_config(k))?;
            let m = svm::train_with(&d.train, &config.svm)?;
            Ok((d, m))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            n_datasets: 2,
            generator: GeneratorConfig { n_train: 200, n_test: 200, ..Default::default() },
            window_grid: 20,
            threshold_grid: 20,
            ..Default::default()
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in MethodId::ALL {
            assert_eq!(m.name().parse::<MethodId>().unwrap(), m);
        }
        assert_eq!("dmov2".parse::<MethodId>().unwrap(), MethodId::Dmov2);
        assert!("SVM".parse::<MethodId>().is_err());
    }

    #[test]
    fn lambda_assignment() {
        let c = ExperimentConfig::default();
        assert_eq!(MethodId::Dmov1.lambda(&c), Some(1.0));
        assert_eq!(MethodId::Dca1.lambda(&c), Some(1.0));
        assert_eq!(MethodId::Dmov2.lambda(&c), Some(100.0));
        assert_eq!(MethodId::Dca2.lambda(&c), Some(100.0));
        assert_eq!(MethodId::Smov.lambda(&c), None);
    }

    #[test]
    fn two_dataset_lnc_table() {
        let config = ExperimentConfig { methods: vec![MethodId::Lnc], ..small_config() };
        let t = run_experiment(&config).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.dataset_indexes(), vec![0, 1]);
        assert!(t.rows.iter().all(|r| r.tuned_parameter.is_none()));
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig { methods: vec![], ..small_config() }.validate().is_err());
        assert!(ExperimentConfig { n_datasets: 1, ..small_config() }.validate().is_err());
        assert!(ExperimentConfig { lambda_high: 0.0, ..small_config() }.validate().is_err());
    }

    #[test]
    fn run_method_matches_run_dataset() {
        let config = small_config();
        let d = datagen::generate_dataset(&config.dataset_config(1)).unwrap();
        let rows = run_dataset(1, &d, &config).unwrap();
        for row in rows {
            let single = run_method(row.method, &d, &config).unwrap();
            assert_eq!(single.error_rate, row.error_rate, "{}", row.method);
            assert_eq!(single.tuned_parameter, row.tuned_parameter);
        }
    }

    #[test]
    fn failures_name_method_and_dataset() {
        let config = small_config();
        let mut d = datagen::generate_dataset(&config.dataset_config(0)).unwrap();
        for inst in &mut d.train {
            inst.label = crate::Label::Normal;
        }
        let err = run_dataset(7, &d, &config).unwrap_err();
        assert!(matches!(err, Error::Method { method: MethodId::Lnc, dataset: 7, .. }), "{err}");
    }
}
