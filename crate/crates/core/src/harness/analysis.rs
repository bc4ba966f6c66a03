//! Statistical comparison of the per-dataset error rates.

use super::{MethodId, ResultsTable};
use crate::stats::{self, Alternative, PairedSample, PairedTest, TestReport};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum TestOutcome {
    Report {
        test: &'static str,
        report: TestReport,
    },
    /// The test could not be computed, e.g. every paired difference is zero.
    Degenerate {
        test: &'static str,
        reason: String,
    },
}

impl TestOutcome {
    fn from_result(test: &'static str, r: Result<TestReport>) -> Self {
        match r {
            Ok(report) => TestOutcome::Report { test, report },
            Err(e) => TestOutcome::Degenerate { test, reason: e.to_string() },
        }
    }

    pub fn test_name(&self) -> &'static str {
        match self {
            TestOutcome::Report { test, .. } | TestOutcome::Degenerate { test, .. } => test,
        }
    }

    pub fn report(&self) -> Option<&TestReport> {
        match self {
            TestOutcome::Report { report, .. } => Some(report),
            TestOutcome::Degenerate { .. } => None,
        }
    }

    pub fn p_value(&self) -> Option<f64> {
        self.report().map(|r| r.p_value)
    }

    pub fn rejects(&self) -> bool {
        self.report().is_some_and(|r| r.rejects())
    }
}

/// Test of `a` against `b`. For one-sided tests the alternative is that `a`
/// has lower error than `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOutcome {
    pub a: MethodId,
    pub b: MethodId,
    pub outcome: TestOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoolAnalysis {
    pub name: &'static str,
    pub dataset_indexes: Vec<usize>,
    pub mean_errors: Vec<(MethodId, f64)>,
    pub normality: Vec<(MethodId, TestOutcome)>,
    /// Every pair of methods, two-sided Wilcoxon.
    pub two_sided: Vec<PairOutcome>,
    /// One representative per family, worst first.
    pub ordering: Vec<MethodId>,
    /// Each later method of `ordering` against each earlier one, with the
    /// alternative that the later one has lower error.
    pub one_sided: Vec<PairOutcome>,
}

impl PoolAnalysis {
    pub fn ordering_established(&self) -> bool {
        !self.one_sided.is_empty() && self.one_sided.iter().all(|p| p.outcome.rejects())
    }

    pub fn best(&self) -> Option<MethodId> {
        self.ordering.last().copied()
    }

    pub fn mean_error(&self, m: MethodId) -> Option<f64> {
        self.mean_errors.iter().find(|(x, _)| *x == m).map(|(_, e)| *e)
    }

    pub fn two_sided_for(&self, a: MethodId, b: MethodId) -> Option<&PairOutcome> {
        self.two_sided.iter().find(|p| (p.a, p.b) == (a, b) || (p.a, p.b) == (b, a))
    }

    pub fn one_sided_for(&self, better: MethodId, worse: MethodId) -> Option<&PairOutcome> {
        self.one_sided.iter().find(|p| p.a == better && p.b == worse)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub pools: Vec<PoolAnalysis>,
}

impl AnalysisReport {
    pub fn pool(&self, name: &str) -> Option<&PoolAnalysis> {
        self.pools.iter().find(|p| p.name == name)
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn paired_name(t: PairedTest) -> &'static str {
    match t {
        PairedTest::TTest => "t_test",
        PairedTest::Wilcoxon => "wilcoxon",
    }
}

fn analyse_pool(name: &'static str, table: &ResultsTable, keep: &[usize]) -> PoolAnalysis {
    let methods = table.methods();
    let errors =
        |m: MethodId| -> Vec<f64> { keep.iter().filter_map(|&k| table.get(k, m)).map(|r| r.error_rate).collect() };
    let mean_errors: Vec<(MethodId, f64)> = methods.iter().map(|&m| (m, mean(&errors(m)))).collect();
    let normality = methods
        .iter()
        .map(|&m| (m, TestOutcome::from_result("shapiro_wilk", stats::shapiro_wilk(&errors(m)))))
        .collect();

    let pair = |a: MethodId, b: MethodId, alt: Alternative, protocol: bool| {
        let outcome = match PairedSample::new(errors(a), errors(b)) {
            Err(e) => TestOutcome::Degenerate { test: "wilcoxon", reason: e.to_string() },
            Ok(s) if protocol => match stats::paired_test(&s, alt) {
                Ok((t, report)) => TestOutcome::Report { test: paired_name(t), report },
                Err(e) => {
                    TestOutcome::Degenerate { test: paired_name(stats::choose_test(&s).test), reason: e.to_string() }
                }
            },
            Ok(s) => TestOutcome::from_result("wilcoxon", stats::wilcoxon_signed_rank(&s, alt)),
        };
        PairOutcome { a, b, outcome }
    };

    let mut two_sided = Vec::new();
    for (i, &a) in methods.iter().enumerate() {
        for &b in &methods[i + 1..] {
            two_sided.push(pair(a, b, Alternative::TwoSided, false));
        }
    }

    // Best parameterisation per family, lowest mean error, earlier on ties.
    let mut reps: Vec<(MethodId, f64)> = Vec::new();
    for &(m, e) in &mean_errors {
        match reps.iter_mut().find(|(r, _)| r.family() == m.family()) {
            Some(slot) if e < slot.1 => *slot = (m, e),
            Some(_) => {}
            None => reps.push((m, e)),
        }
    }
    // Worst first; stable so ties keep method order.
    reps.sort_by(|x, y| y.1.total_cmp(&x.1));
    let ordering: Vec<MethodId> = reps.iter().map(|(m, _)| *m).collect();

    let mut one_sided = Vec::new();
    for (i, &worse) in ordering.iter().enumerate() {
        for &better in &ordering[i + 1..] {
            one_sided.push(pair(better, worse, Alternative::Less, true));
        }
    }

    PoolAnalysis { name, dataset_indexes: keep.to_vec(), mean_errors, normality, two_sided, ordering, one_sided }
}

/// Analyses all datasets, and separately the datasets on which at least one
/// method made an error.
pub fn analyze(table: &ResultsTable) -> AnalysisReport {
    let all = table.dataset_indexes();
    let hard: Vec<usize> = all
        .iter()
        .copied()
        .filter(|&k| table.rows.iter().any(|r| r.dataset_index == k && r.error_rate != 0.0))
        .collect();
    AnalysisReport { pools: vec![analyse_pool("all", table, &all), analyse_pool("non_separable", table, &hard)] }
}
