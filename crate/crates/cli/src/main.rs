use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dcabench::datagen;
use dcabench::harness::{self, ExperimentConfig, OutputFiles};

#[derive(Parser)]
#[command(name = "dcabench", version, about = "Windowed linear classifiers versus the dendritic cell algorithm")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// key = value file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of datasets in the suite
    #[arg(long, global = true)]
    datasets: Option<usize>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated, e.g. LNC,SMOV,DCA1
    #[arg(long, global = true)]
    methods: Option<String>,
    /// Low and high λ, e.g. 1,100
    #[arg(long, global = true)]
    lambda: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the dataset suite as CSV files
    Generate,
    /// Run every method and write error_rates.csv
    Run,
    /// Analyse an existing error_rates.csv
    Analyze {
        /// Defaults to <out>/error_rates.csv
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Write gain_sweeps.csv
    SweepGains,
    /// Run, analyse and write every output file
    All,
}

fn load_config(o: &Opts) -> Result<ExperimentConfig> {
    let mut c = match &o.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = o.seed {
        c.seed = s;
    }
    if let Some(n) = o.datasets {
        c.n_datasets = n;
    }
    if let Some(d) = &o.out {
        c.output_dir = d.clone();
    }
    if let Some(m) = &o.methods {
        c.set("methods", m)?;
    }
    if let Some(l) = &o.lambda {
        c.set("lambda", l)?;
    }
    c.validate()?;
    Ok(c)
}

fn create_out_dir(c: &ExperimentConfig) -> Result<()> {
    fs::create_dir_all(&c.output_dir).with_context(|| format!("creating {}", c.output_dir.display()))
}

fn run(cli: Cli) -> Result<()> {
    let config = load_config(&cli.opts)?;
    let files = OutputFiles::in_dir(&config.output_dir);
    match cli.command {
        Command::Generate => {
            let dir = config.output_dir.join("data");
            let suite = datagen::generate_benchmark_suite(config.n_datasets, &config.generator, config.seed)?;
            let paths = datagen::write_suite(&dir, &config.suite_name, &suite)?;
            println!("wrote {} files to {}", paths.len(), dir.display());
        }
        Command::Run => {
            let table = harness::run_experiment(&config)?;
            create_out_dir(&config)?;
            let f = File::create(&files.error_rates).with_context(|| files.error_rates.display().to_string())?;
            harness::write_error_rates(BufWriter::new(f), &table)
                .with_context(|| files.error_rates.display().to_string())?;
            println!("wrote {} rows to {}", table.rows.len(), files.error_rates.display());
        }
        Command::Analyze { input } => {
            let input = input.unwrap_or_else(|| files.error_rates.clone());
            let table = harness::read_error_rates(&input)?;
            let report = harness::analyze(&table);
            create_out_dir(&config)?;
            let f = File::create(&files.stats_report).with_context(|| files.stats_report.display().to_string())?;
            harness::write_stats_report(BufWriter::new(f), &report)
                .with_context(|| files.stats_report.display().to_string())?;
            let f = File::create(&files.summary).with_context(|| files.summary.display().to_string())?;
            harness::write_summary(BufWriter::new(f), &table, &report)
                .with_context(|| files.summary.display().to_string())?;
            print!("{}", fs::read_to_string(&files.summary)?);
        }
        Command::SweepGains => {
            create_out_dir(&config)?;
            harness::write_gain_file(&config, &files.gain_sweeps)?;
            println!("wrote {}", files.gain_sweeps.display());
        }
        Command::All => {
            let table = harness::run_experiment(&config)?;
            let report = harness::analyze(&table);
            let files = harness::emit_outputs(&config, &table, &report)?;
            print!("{}", fs::read_to_string(&files.summary)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
