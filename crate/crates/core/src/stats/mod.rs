//! Normality and paired-difference tests.
//!
//! Shapiro-Wilk decides whether paired samples may go to the paired t-test;
//! otherwise the Wilcoxon signed-rank test is used. Everything is judged at
//! [`SIGNIFICANCE`].

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

mod shapiro;
mod ttest;
mod wilcoxon;

pub use shapiro::shapiro_wilk;
pub use ttest::paired_t_test;
pub use wilcoxon::{wilcoxon_signed_rank, wilcoxon_with, WilcoxonMethod, EXACT_MAX_N};

pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alternative {
    TwoSided,
    /// `a` tends to be smaller than `b`.
    Less,
    /// `a` tends to be larger than `b`.
    Greater,
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alternative::TwoSided => "two-sided",
            Alternative::Less => "less",
            Alternative::Greater => "greater",
        })
    }
}

impl FromStr for Alternative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-sided" => Ok(Alternative::TwoSided),
            "less" => Ok(Alternative::Less),
            "greater" => Ok(Alternative::Greater),
            other => Err(Error::Parse(format!("unknown alternative {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestReport {
    pub statistic: f64,
    pub p_value: f64,
    /// `None` for tests without a direction, such as Shapiro-Wilk.
    pub alternative: Option<Alternative>,
    /// Observations used, after any zero-difference removal.
    pub n_effective: usize,
}

impl TestReport {
    pub fn rejects(&self) -> bool {
        self.p_value < SIGNIFICANCE
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl PairedSample {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
        }
        if a.len() < 2 {
            return Err(Error::SampleSize { n: a.len(), min: 2, max: usize::MAX });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn differences(&self) -> Vec<f64> {
        self.a.iter().zip(&self.b).map(|(x, y)| x - y).collect()
    }

    pub fn swapped(&self) -> Self {
        Self { a: self.b.clone(), b: self.a.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairedTest {
    TTest,
    Wilcoxon,
}

/// Outcome of the normality screen. A `None` report means Shapiro-Wilk
/// could not be computed (for instance a constant sample), which counts as
/// a failed screen.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSelection {
    pub normality_a: Option<TestReport>,
    pub normality_b: Option<TestReport>,
    pub normality_diff: Option<TestReport>,
    pub test: PairedTest,
}

pub fn choose_test(s: &PairedSample) -> TestSelection {
    let normality_a = shapiro_wilk(s.a()).ok();
    let normality_b = shapiro_wilk(s.b()).ok();
    let normality_diff = shapiro_wilk(&s.differences()).ok();
    let normal = [normality_a, normality_b, normality_diff].iter().all(|r| r.is_some_and(|r| !r.rejects()));
    TestSelection {
        normality_a,
        normality_b,
        normality_diff,
        test: if normal { PairedTest::TTest } else { PairedTest::Wilcoxon },
    }
}

/// Runs whichever paired test `choose_test` selects.
pub fn paired_test(s: &PairedSample, alternative: Alternative) -> Result<(PairedTest, TestReport)> {
    let choice = choose_test(s).test;
    let report = match choice {
        PairedTest::TTest => paired_t_test(s, alternative)?,
        PairedTest::Wilcoxon => wilcoxon_signed_rank(s, alternative)?,
    };
    Ok((choice, report))
}
