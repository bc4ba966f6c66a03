//! Result files.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{AnalysisReport, ExperimentConfig, PairOutcome, ResultRow, ResultsTable, TestOutcome};
use crate::spectral;
use crate::{Error, Result};

pub const ERROR_RATES_FILE: &str = "error_rates.csv";
pub const STATS_REPORT_FILE: &str = "stats_report.csv";
pub const GAIN_SWEEPS_FILE: &str = "gain_sweeps.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

#[derive(Debug, Clone, PartialEq)]
pub struct OutputFiles {
    pub error_rates: PathBuf,
    pub stats_report: PathBuf,
    pub gain_sweeps: PathBuf,
    pub summary: PathBuf,
}

impl OutputFiles {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            error_rates: dir.join(ERROR_RATES_FILE),
            stats_report: dir.join(STATS_REPORT_FILE),
            gain_sweeps: dir.join(GAIN_SWEEPS_FILE),
            summary: dir.join(SUMMARY_FILE),
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

/// `dataset_index,centroid_distance,method,error_rate,tuned_parameter`. Floats
/// use the shortest representation that reads back to the same value.
pub fn write_error_rates<W: Write>(out: W, table: &ResultsTable) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["dataset_index", "centroid_distance", "method", "error_rate", "tuned_parameter"])?;
    for r in &table.rows {
        wtr.write_record([
            r.dataset_index.to_string(),
            r.centroid_distance.to_string(),
            r.method.to_string(),
            r.error_rate.to_string(),
            r.tuned_parameter.map(|p| p.to_string()).unwrap_or_default(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_error_rates(path: &Path) -> Result<ResultsTable> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        if rec.len() != 5 {
            return Err(Error::Parse(format!("{}: expected 5 fields, got {}", path.display(), rec.len())));
        }
        let num = |i: usize| -> Result<f64> {
            rec[i].parse().map_err(|_| Error::Parse(format!("{}: bad number {:?}", path.display(), &rec[i])))
        };
        rows.push(ResultRow {
            dataset_index: rec[0]
                .parse()
                .map_err(|_| Error::Parse(format!("{}: bad index {:?}", path.display(), &rec[0])))?,
            centroid_distance: num(1)?,
            method: rec[2].parse()?,
            error_rate: num(3)?,
            tuned_parameter: if rec[4].is_empty() { None } else { Some(num(4)?) },
        });
    }
    Ok(ResultsTable { rows })
}

fn outcome_record(name: String, o: &TestOutcome) -> [String; 5] {
    match o {
        TestOutcome::Report { report, .. } => [
            name,
            report.statistic.to_string(),
            report.p_value.to_string(),
            report.alternative.map(|a| a.to_string()).unwrap_or_default(),
            report.n_effective.to_string(),
        ],
        TestOutcome::Degenerate { .. } => [name, String::new(), String::new(), String::new(), "0".into()],
    }
}

fn pair_name(pool: &str, p: &PairOutcome) -> String {
    format!("{}:{}:{}-{}", p.outcome.test_name(), pool, p.a, p.b)
}

/// `test,statistic,p_value,alternative,n_effective`. Tests that could not be
/// computed have empty statistic, p-value and alternative.
pub fn write_stats_report<W: Write>(out: W, report: &AnalysisReport) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["test", "statistic", "p_value", "alternative", "n_effective"])?;
    for pool in &report.pools {
        for (m, o) in &pool.normality {
            wtr.write_record(outcome_record(format!("{}:{}:{}", o.test_name(), pool.name, m), o))?;
        }
        for p in pool.two_sided.iter().chain(&pool.one_sided) {
            wtr.write_record(outcome_record(pair_name(pool.name, p), &p.outcome))?;
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(mut out: W, table: &ResultsTable, report: &AnalysisReport) -> std::io::Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "datasets: {}", table.dataset_indexes().len());
    for pool in &report.pools {
        let _ = writeln!(s, "\n[{}] {} datasets", pool.name, pool.dataset_indexes.len());
        for (m, e) in &pool.mean_errors {
            let _ = writeln!(s, "  mean error {m:<6} {e:.4}");
        }
        let names: Vec<String> = pool.ordering.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(s, "  ordering (worst to best): {}", names.join(" < "));
        for p in &pool.one_sided {
            let verdict = match p.outcome.p_value() {
                Some(v) => format!("p = {v:.3e}"),
                None => "not computable".into(),
            };
            let _ = writeln!(s, "  {} better than {}: {} {}", p.a, p.b, p.outcome.test_name(), verdict);
        }
        let _ = writeln!(
            s,
            "  ordering {}",
            if pool.ordering_established() { "established at 0.05" } else { "not established at 0.05" }
        );
        if let Some(best) = pool.best() {
            let _ = writeln!(s, "  best: {best}");
        }
    }
    out.write_all(s.as_bytes())
}

/// Writes every result file into `config.output_dir`.
pub fn emit_outputs(config: &ExperimentConfig, table: &ResultsTable, report: &AnalysisReport) -> Result<OutputFiles> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = OutputFiles::in_dir(dir);
    write_error_rates(create(&files.error_rates)?, table).map_err(|e| Error::csv(&files.error_rates, e))?;
    write_stats_report(create(&files.stats_report)?, report).map_err(|e| Error::csv(&files.stats_report, e))?;
    write_gain_file(config, &files.gain_sweeps)?;
    let mut w = create(&files.summary)?;
    write_summary(&mut w, table, report).and_then(|_| w.flush()).map_err(|e| Error::io(&files.summary, e))?;
    Ok(files)
}

pub fn write_gain_file(config: &ExperimentConfig, path: &Path) -> Result<()> {
    let mut rows = Vec::new();
    for &w in &config.sweep_widths {
        rows.extend(spectral::gain_sweep(w, config.sweep_points)?);
    }
    spectral::write_gain_sweeps(create(path)?, &rows).map_err(|e| Error::csv(path, e))
}
