//! `zerocurve`: KdV hierarchy generation, canonical-system zero-curvature checks and
//! numerical experiments, all reported as JSON.
//!
//! Exit status is 0 when every residual is within tolerance, 1 on bad input and
//! 2 when a check fails.

mod cs;
mod hierarchy;
mod inputs;
mod report;
mod sim;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Deserialize;
use zerocurve::config::Tolerances;

#[derive(Parser, Debug)]
#[command(name = "zerocurve", version, about = "Zero-curvature equations of Schrödinger operators and canonical systems")]
struct Cli {
    /// TOML file with a [tolerances] table and an optional max_degree.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// KdV hierarchy members.
    #[command(subcommand)]
    Hierarchy(hierarchy::HierarchyCommand),
    /// Canonical systems.
    #[command(subcommand)]
    Cs(cs::CsCommand),
    /// Numerical experiments.
    #[command(subcommand)]
    Sim(sim::SimCommand),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    tolerances: Tolerances,
    max_degree: Option<usize>,
}

/// Settings shared by every command.
#[derive(Debug, Clone)]
pub struct Settings {
    pub tolerances: Tolerances,
    pub max_degree: Option<usize>,
    pub output: Option<String>,
}

fn load_settings(cli: &Cli) -> Result<Settings> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str::<ConfigFile>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ConfigFile::default(),
    };
    let tolerances = file.tolerances.with_env_scale()?;
    tolerances.validate()?;
    Ok(Settings {
        tolerances,
        max_degree: file.max_degree,
        output: cli.out.as_ref().map(|p| p.display().to_string()),
    })
}

fn run(cli: &Cli) -> Result<report::Report> {
    let settings = load_settings(cli)?;
    let report = match &cli.command {
        Command::Hierarchy(c) => hierarchy::run(c, &settings)?,
        Command::Cs(c) => cs::run(c, &settings)?,
        Command::Sim(c) => sim::run(c, &settings)?,
    };
    if let Some(path) = &cli.out {
        std::fs::write(path, report.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.to_json());
            if let Some(err) = &report.error {
                eprintln!("error: {err}");
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
