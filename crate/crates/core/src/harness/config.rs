//! Flat `key = value` configuration files. Blank lines and `#` comments are
//! ignored; later keys override earlier ones.

use std::path::Path;

use super::{ExperimentConfig, MethodId};
use crate::{Error, Result};

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse(format!("invalid value {value:?} for {key}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

pub fn parse_methods(value: &str) -> Result<Vec<MethodId>> {
    value.split(',').map(str::parse).collect()
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "seed" => self.seed = parse(key, value)?,
            "datasets" => self.n_datasets = parse(key, value)?,
            "methods" => self.methods = parse_methods(value)?,
            "window_grid" => self.window_grid = parse(key, value)?,
            "threshold_grid" => self.threshold_grid = parse(key, value)?,
            "dca_safe_weight" => self.dca_safe_weight = parse(key, value)?,
            "svm_c" => self.svm.c = parse(key, value)?,
            "svm_tol" => self.svm.tol = parse(key, value)?,
            "svm_max_iter" => self.svm.max_iter = parse(key, value)?,
            "lambda" => {
                let l: Vec<f64> = parse_list(key, value)?;
                let [low, high] = l[..] else {
                    return Err(Error::Parse(format!("lambda needs two values, got {value:?}")));
                };
                self.lambda_low = low;
                self.lambda_high = high;
            }
            "n_train" => self.generator.n_train = parse(key, value)?,
            "n_test" => self.generator.n_test = parse(key, value)?,
            "stddev" => self.generator.stddev = parse(key, value)?,
            "class1_mean" => self.generator.class1_mean = parse(key, value)?,
            "class2_mean" => self.generator.class2_mean = parse(key, value)?,
            "suite" => self.suite_name = value.to_string(),
            "out" => self.output_dir = value.into(),
            "sweep_widths" => self.sweep_widths = parse_list(key, value)?,
            "sweep_points" => self.sweep_points = parse(key, value)?,
            other => return Err(Error::Parse(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut c = Self::default();
        c.apply_text(&text)?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let mut c = ExperimentConfig::default();
        c.apply_text("# run\nseed = 7\ndatasets=12 # small\nmethods = LNC, dca2\nlambda = 2,50\n\nsweep_widths=3,5\n")
            .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.n_datasets, 12);
        assert_eq!(c.methods, vec![MethodId::Lnc, MethodId::Dca2]);
        assert_eq!((c.lambda_low, c.lambda_high), (2.0, 50.0));
        assert_eq!(c.sweep_widths, vec![3, 5]);
    }

    #[test]
    fn rejects_bad_lines() {
        let mut c = ExperimentConfig::default();
        assert!(c.apply_text("seed 7").is_err());
        assert!(c.apply_text("colour = red").is_err());
        assert!(c.apply_text("seed = x").is_err());
        assert!(c.apply_text("lambda = 1").is_err());
    }
}
