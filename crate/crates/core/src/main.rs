use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spin_torus::scenario::{
    export, run_scenario, verify_with, ExportFormat, RunRecord, ScenarioConfig, ScenarioError, VerifyOptions,
    DEFAULT_VERIFY_SEED,
};

/// Two-spin Heisenberg evolution: torus geometry and entanglement.
#[derive(Debug, Parser)]
#[command(name = "spin-torus", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario config and write its run record (JSON).
    Run {
        config: PathBuf,
        /// Output path; defaults to `<config stem>.record.json` beside the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the metric scale factor.
        #[arg(long)]
        gamma: Option<f64>,
        /// Override the classification threshold on metric components.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run the invariant and oracle battery. Exits 1 if any check fails.
    Verify {
        #[arg(long, default_value_t = DEFAULT_VERIFY_SEED)]
        seed: u64,
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Negative control: corrupt one propagator entry.
        #[arg(long, hide = true)]
        corrupt_propagator: bool,
    },
    /// Convert a run record to CSV or JSON.
    Export {
        record: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(long)]
        out: PathBuf,
    },
}

fn default_record_path(config: &Path) -> PathBuf {
    let stem = config.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into());
    config.with_file_name(format!("{stem}.record.json"))
}

fn write_file(path: &Path, text: &str) -> Result<(), ScenarioError> {
    std::fs::write(path, text).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })
}

fn run(cli: Cli) -> Result<ExitCode, ScenarioError> {
    match cli.command {
        Command::Run { config, out, gamma, tol } => {
            let mut cfg = ScenarioConfig::from_path(&config)?;
            if let Some(g) = gamma {
                cfg.params.gamma = g;
            }
            if tol.is_some() {
                cfg.degeneracy_tol = tol;
            }
            let record = run_scenario(&cfg)?;
            for w in &record.warnings {
                eprintln!("warning: {w}");
            }
            let out = out.unwrap_or_else(|| default_record_path(&config));
            write_file(&out, &record.to_json())?;
            eprintln!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { seed, out, corrupt_propagator } => {
            let report = verify_with(VerifyOptions { seed, corrupt_propagator });
            println!("{report}");
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&report).expect("report serializes");
                write_file(&path, &format!("{text}\n"))?;
            }
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Export { record, format, out } => {
            let text = std::fs::read_to_string(&record)
                .map_err(|source| ScenarioError::Io { path: record.clone(), source })?;
            let rec = RunRecord::from_json(&text)?;
            export(&rec, format, &out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
