//! Synthetic two-Gaussian, quarter-ordered benchmark data.
//!
//! Each split is cut into four equal contiguous quarters labelled
//! (normal, anomalous, normal, anomalous). Every feature of a normal instance
//! is drawn from `N(class1_mean, stddev)`, every feature of an anomalous one
//! from `N(class2_mean, stddev)`. Train and test are quartered independently.
//!
//! Sampling uses ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded through
//! `seed_from_u64`, with standard normal deviates from `rand_distr`'s
//! ziggurat sampler. Suite member `k` is seeded with the `k + 1`-th output of
//! a SplitMix64 stream started at the suite seed, see [`dataset_seed`].

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::{Error, Label, Result};

/// Upper end of the class II mean sweep when a suite is built from defaults.
pub const SUITE_MAX_MEAN: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n_train: usize,
    pub n_test: usize,
    pub n_features: usize,
    pub class1_mean: f64,
    pub class2_mean: f64,
    pub stddev: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            n_train: 1000,
            n_test: 1000,
            n_features: 2,
            class1_mean: 0.2,
            class2_mean: SUITE_MAX_MEAN,
            stddev: 0.1,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("n_train", self.n_train), ("n_test", self.n_test)] {
            if n == 0 || n % 4 != 0 {
                return Err(Error::InvalidConfig(format!("{name} = {n} must be a positive multiple of 4")));
            }
        }
        if self.n_features == 0 {
            return Err(Error::InvalidConfig("n_features must be at least 1".into()));
        }
        if !(self.stddev > 0.0 && self.stddev.is_finite()) {
            return Err(Error::InvalidConfig(format!("stddev = {} must be positive and finite", self.stddev)));
        }
        if !(self.class1_mean.is_finite() && self.class2_mean.is_finite()) {
            return Err(Error::InvalidConfig("class means must be finite".into()));
        }
        if self.class2_mean < self.class1_mean {
            return Err(Error::InvalidConfig(format!(
                "class2_mean = {} is below class1_mean = {}",
                self.class2_mean, self.class1_mean
            )));
        }
        Ok(())
    }

    /// Distance between the nominal class centroids, `√d · (μ₂ − μ₁)`.
    pub fn nominal_centroid_distance(&self) -> f64 {
        (self.n_features as f64).sqrt() * (self.class2_mean - self.class1_mean)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledInstance {
    pub features: Vec<f64>,
    pub label: Label,
    /// 1-based position in the series.
    pub time_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: Vec<LabeledInstance>,
    pub test: Vec<LabeledInstance>,
    pub config: GeneratorConfig,
}

/// Label of position `t` (0-based) in a quarter-ordered split of length `n`.
pub fn quarter_label(t: usize, n: usize) -> Label {
    if (4 * t / n).is_multiple_of(2) {
        Label::Normal
    } else {
        Label::Anomalous
    }
}

pub fn generate_dataset(config: &GeneratorConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let train = generate_split(&mut rng, config, config.n_train);
    let test = generate_split(&mut rng, config, config.n_test);
    Ok(Dataset { train, test, config: config.clone() })
}

fn generate_split(rng: &mut ChaCha20Rng, config: &GeneratorConfig, n: usize) -> Vec<LabeledInstance> {
    (0..n)
        .map(|t| {
            let label = quarter_label(t, n);
            let mean = match label {
                Label::Normal => config.class1_mean,
                Label::Anomalous => config.class2_mean,
            };
            let features = (0..config.n_features)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    mean + config.stddev * z
                })
                .collect();
            LabeledInstance { features, label, time_index: t + 1 }
        })
        .collect()
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of suite member `index`: the `index + 1`-th SplitMix64 output for
/// the stream starting at `suite_seed`.
pub fn dataset_seed(suite_seed: u64, index: usize) -> u64 {
    const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
    splitmix64(suite_seed.wrapping_add((index as u64 + 1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Class II mean for member `index` of an `n_datasets` sweep running from
/// `base.class1_mean` to `base.class2_mean`.
pub fn suite_class2_mean(base: &GeneratorConfig, n_datasets: usize, index: usize) -> f64 {
    let t = index as f64 / (n_datasets - 1) as f64;
    base.class1_mean * (1.0 - t) + base.class2_mean * t
}

/// The suite configuration for member `index`, without generating data.
pub fn suite_member_config(base: &GeneratorConfig, n_datasets: usize, seed: u64, index: usize) -> GeneratorConfig {
    GeneratorConfig {
        class2_mean: suite_class2_mean(base, n_datasets, index),
        seed: dataset_seed(seed, index),
        ..base.clone()
    }
}

pub fn generate_benchmark_suite(n_datasets: usize, base: &GeneratorConfig, seed: u64) -> Result<Vec<Dataset>> {
    if n_datasets < 2 {
        return Err(Error::InvalidConfig(format!("a benchmark suite needs at least 2 datasets, got {n_datasets}")));
    }
    base.validate()?;
    (0..n_datasets).into_par_iter().map(|k| generate_dataset(&suite_member_config(base, n_datasets, seed, k))).collect()
}

/// Per-class empirical mean over train and test.
pub fn class_centroid(d: &Dataset, label: Label) -> Result<Vec<f64>> {
    let mut sum = vec![0.0; d.config.n_features];
    let mut count = 0usize;
    for inst in d.train.iter().chain(&d.test).filter(|i| i.label == label) {
        for (s, x) in sum.iter_mut().zip(&inst.features) {
            *s += x;
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::MissingClass(label));
    }
    Ok(sum.into_iter().map(|s| s / count as f64).collect())
}

/// Euclidean distance between the empirical class centroids.
pub fn centroid_distance(d: &Dataset) -> Result<f64> {
    let a = class_centroid(d, Label::Normal)?;
    let b = class_centroid(d, Label::Anomalous)?;
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
}

pub fn split_file_names(suite: &str, index: usize) -> (String, String) {
    (format!("{suite}_{index}_train.csv"), format!("{suite}_{index}_test.csv"))
}

/// Writes one split as `time_index,f1,...,fd,label`.
pub fn write_split<W: Write>(out: W, split: &[LabeledInstance], n_features: usize) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["time_index".to_string()];
    header.extend((1..=n_features).map(|j| format!("f{j}")));
    header.push("label".into());
    w.write_record(&header)?;
    for inst in split {
        let mut row = Vec::with_capacity(n_features + 2);
        row.push(inst.time_index.to_string());
        row.extend(inst.features.iter().map(|x| x.to_string()));
        row.push(inst.label.as_i8().to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_split(path: &Path) -> Result<Vec<LabeledInstance>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(BufReader::new(file));
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("{}: {s:?}: {e}", path.display())));
        let n = rec.len();
        if n < 3 {
            return Err(Error::Parse(format!("{}: short record", path.display())));
        }
        let time_index =
            rec[0].parse::<usize>().map_err(|e| Error::Parse(format!("{}: time_index: {e}", path.display())))?;
        let features = (1..n - 1).map(|j| parse(&rec[j])).collect::<Result<Vec<_>>>()?;
        let label = rec[n - 1]
            .parse::<i8>()
            .ok()
            .and_then(Label::from_i8)
            .ok_or_else(|| Error::Parse(format!("{}: bad label {:?}", path.display(), &rec[n - 1])))?;
        out.push(LabeledInstance { features, label, time_index });
    }
    Ok(out)
}

/// Writes `<suite>_<k>_train.csv` and `<suite>_<k>_test.csv` for every
/// dataset into `dir`, returning the written paths.
pub fn write_suite(dir: &Path, suite: &str, datasets: &[Dataset]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::with_capacity(2 * datasets.len());
    for (k, d) in datasets.iter().enumerate() {
        let (train_name, test_name) = split_file_names(suite, k);
        for (name, split) in [(train_name, &d.train), (test_name, &d.test)] {
            let path = dir.join(name);
            let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
            write_split(file, split, d.config.n_features).map_err(|e| Error::csv(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n: usize) -> GeneratorConfig {
        GeneratorConfig { n_train: n, n_test: n, seed: 7, ..Default::default() }
    }

    #[test]
    fn eight_instance_quarter_pattern() {
        let d = generate_dataset(&small(8)).unwrap();
        let labels: Vec<i8> = d.train.iter().map(|i| i.label.as_i8()).collect();
        assert_eq!(labels, [-1, -1, 1, 1, -1, -1, 1, 1]);
        let labels: Vec<i8> = d.test.iter().map(|i| i.label.as_i8()).collect();
        assert_eq!(labels, [-1, -1, 1, 1, -1, -1, 1, 1]);
        let idx: Vec<usize> = d.train.iter().map(|i| i.time_index).collect();
        assert_eq!(idx, (1..=8).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(generate_dataset(&small(10)).is_err());
        assert!(generate_dataset(&GeneratorConfig { n_test: 6, ..small(8) }).is_err());
        assert!(generate_dataset(&GeneratorConfig { stddev: 0.0, ..small(8) }).is_err());
        assert!(generate_dataset(&GeneratorConfig { stddev: -0.1, ..small(8) }).is_err());
        assert!(generate_dataset(&GeneratorConfig { class2_mean: 0.1, ..small(8) }).is_err());
        assert!(generate_benchmark_suite(1, &small(8), 0).is_err());
    }

    #[test]
    fn reproducible() {
        let cfg = GeneratorConfig { seed: 99, ..Default::default() };
        assert_eq!(generate_dataset(&cfg).unwrap(), generate_dataset(&cfg).unwrap());
        let other = GeneratorConfig { seed: 100, ..cfg.clone() };
        assert_ne!(generate_dataset(&cfg).unwrap().train, generate_dataset(&other).unwrap().train);
    }

    #[test]
    fn class_means_converge() {
        // stddev / sqrt(n) with n = 1000 per class (500 train + 500 test) is
        // about 0.0032, so 0.01 is more than three standard errors.
        let cfg = GeneratorConfig { class2_mean: 0.8, seed: 3, ..Default::default() };
        let d = generate_dataset(&cfg).unwrap();
        let c2 = class_centroid(&d, Label::Anomalous).unwrap();
        let c1 = class_centroid(&d, Label::Normal).unwrap();
        for j in 0..2 {
            assert!((c2[j] - 0.8).abs() < 0.01, "{c2:?}");
            assert!((c1[j] - 0.2).abs() < 0.01, "{c1:?}");
        }
        let nominal = 0.6 * 2f64.sqrt();
        assert!((nominal - 0.848_528_137).abs() < 1e-9);
        assert!((centroid_distance(&d).unwrap() - nominal).abs() < 3.0 * 0.1 * (2.0f64 / 1000.0).sqrt() * 2.0);
    }

    #[test]
    fn total_overlap_has_near_zero_distance() {
        let cfg = GeneratorConfig { class2_mean: 0.2, seed: 11, ..Default::default() };
        let d = generate_dataset(&cfg).unwrap();
        // Both centroids are means of 1000 draws; each coordinate of the
        // difference has sd 0.1 * sqrt(2/1000).
        let tol = 3.0 * 0.1 * (2.0f64 / 1000.0).sqrt() * 2f64.sqrt();
        assert!(centroid_distance(&d).unwrap() < tol);
    }

    #[test]
    fn label_balance() {
        let d = generate_dataset(&GeneratorConfig { n_train: 1000, n_test: 200, ..Default::default() }).unwrap();
        for split in [&d.train, &d.test] {
            let anomalous = split.iter().filter(|i| i.label == Label::Anomalous).count();
            assert_eq!(2 * anomalous, split.len());
        }
    }

    #[test]
    fn centroid_distance_requires_both_classes() {
        let mut d = generate_dataset(&small(8)).unwrap();
        for inst in d.train.iter_mut().chain(d.test.iter_mut()) {
            inst.label = Label::Normal;
        }
        assert!(matches!(centroid_distance(&d), Err(Error::MissingClass(Label::Anomalous))));
    }

    #[test]
    fn suite_sweeps_class2_mean() {
        let base = GeneratorConfig::default();
        assert_eq!(suite_class2_mean(&base, 100, 0), 0.2);
        assert_eq!(suite_class2_mean(&base, 100, 99), 0.8);
        let step = suite_class2_mean(&base, 100, 1) - suite_class2_mean(&base, 100, 0);
        assert!((step - 0.6 / 99.0).abs() < 1e-12);
        assert!((step - 0.006_060_6).abs() < 1e-7);

        let suite = generate_benchmark_suite(2, &small(8), 5).unwrap();
        assert_eq!(suite[0].config.class2_mean, 0.2);
        assert_eq!(suite[1].config.class2_mean, 0.8);
        assert_ne!(suite[0].config.seed, suite[1].config.seed);
    }

    #[test]
    fn nominal_distances_of_reference_examples() {
        // Nominal centroid distances 0.17, 0.42 and 0.68 correspond to
        // class II means 0.2 + d / sqrt(2).
        for d in [0.17, 0.42, 0.68] {
            let cfg = GeneratorConfig { class2_mean: 0.2 + d / 2f64.sqrt(), ..Default::default() };
            assert!((cfg.nominal_centroid_distance() - d).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_round_trip() {
        let d = generate_dataset(&small(8)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = write_suite(dir.path(), "toy", std::slice::from_ref(&d)).unwrap();
        assert!(paths[0].ends_with("toy_0_train.csv"));
        assert!(paths[1].ends_with("toy_0_test.csv"));
        let text = std::fs::read_to_string(&paths[0]).unwrap();
        assert!(text.starts_with("time_index,f1,f2,label\n"));
        assert_eq!(read_split(&paths[0]).unwrap(), d.train);
        assert_eq!(read_split(&paths[1]).unwrap(), d.test);
    }
}
