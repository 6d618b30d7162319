//! Command-line driver for twin-beam subtraction sweeps.
//!
//! Exit codes: 0 on success, 1 on any error, 3 when `--strict` is set and a
//! cross-check between numeric and closed-form results fails.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use twinsub::sweep::{
    run, Experiment, OutputFormat, RunOptions, SweepConfig,
};

#[derive(Parser)]
#[command(
    name = "twinsub",
    version,
    about = "Phase-estimation sweeps for photon-subtracted twin-beam interferometry"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the interferometer phase and tabulate the phase error
    PhaseSweep(CommonArgs),
    /// Sweep the transmission and compare lossy phase-error expressions
    LossSweep(CommonArgs),
    /// Sweep the photon number and verify Heisenberg scaling
    NScaling(CommonArgs),
    /// Benchmark the catalog states against their quantum Cramer-Rao bounds
    Table1(CommonArgs),
    /// Compare bucket and coherent subtraction protocols
    ProtocolCompare(CommonArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML sweep configuration file; defaults are used when omitted
    #[arg(long, value_name = "file")]
    config: Option<PathBuf>,
    /// Output directory for the data artifact and manifest
    #[arg(long, value_name = "dir", default_value = "out")]
    out: PathBuf,
    /// Data artifact format
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Fail (exit code 3) when numeric results disagree with closed forms
    #[arg(long)]
    strict: bool,
    /// Number of worker threads (defaults to the rayon global pool)
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

fn load_config(experiment: Experiment, args: &CommonArgs) -> twinsub::Result<SweepConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                twinsub::Error::InvalidParameter(format!(
                    "cannot read config {}: {e}",
                    path.display()
                ))
            })?;
            SweepConfig::from_toml(&text)?
        }
        None => SweepConfig::from_toml(&format!("experiment = \"{}\"", experiment.name()))?,
    };
    if config.experiment != experiment {
        return Err(twinsub::Error::InvalidParameter(format!(
            "config declares experiment \"{}\" but the \"{}\" subcommand was invoked",
            config.experiment.name(),
            experiment.name()
        )));
    }
    config.experiment = experiment;
    Ok(config)
}

fn execute(experiment: Experiment, args: &CommonArgs) -> twinsub::Result<ExitCode> {
    let config = load_config(experiment, args)?;
    let options = RunOptions {
        out_dir: args.out.clone(),
        format: match args.format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        },
        strict: args.strict,
        jobs: args.jobs,
    };
    let report = run(&config, &options)?;
    println!(
        "{}: wrote {} rows to {} (manifest {})",
        experiment.name(),
        report.rows,
        report.data_path.display(),
        report.manifest_path.display()
    );
    if !report.violations.is_empty() {
        for v in &report.violations {
            eprintln!("strict check failed: {v}");
        }
        if options.strict {
            return Ok(ExitCode::from(3));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match &cli.command {
        Command::PhaseSweep(a) => (Experiment::PhaseSweep, a),
        Command::LossSweep(a) => (Experiment::LossSweep, a),
        Command::NScaling(a) => (Experiment::NScaling, a),
        Command::Table1(a) => (Experiment::Table1, a),
        Command::ProtocolCompare(a) => (Experiment::ProtocolCompare, a),
    };
    match execute(experiment, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
