//! Command-line front end: `solve`, `table1`, `table2`, `sweep`, `asympt`
//! and `check`, configured by a JSON job file.

mod commands;
pub mod config;
pub mod tables;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

pub use commands::Output;
pub use config::{Format, JobConfig};

/// Failure of a CLI run, mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Numeric(#[from] crate::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numeric(_) => "numeric",
            CliError::Io(_) => "io",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "chebdesign", version, about = "E- and c-optimal designs from Chebyshev systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON job file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Round table entries to two decimals.
    #[arg(long, global = true)]
    pub round: bool,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Compute and verify the optimal design of the configured model.
    Solve,
    /// E-optimal designs for b = (-1 - z, -1 + z).
    Table1,
    /// Efficiencies of the E-optimal and limiting designs for b = (-1 - z, -1 + z).
    Table2,
    /// Efficiency or eigenvalue-ratio curves over one nonlinear parameter.
    Sweep,
    /// Expansion and convergence checks as the parameters collapse.
    Asympt,
    /// Verify an externally supplied design.
    Check {
        /// Design file, JSON or CSV (`t,weight`).
        #[arg(long)]
        design: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Table1 => "table1",
            Command::Table2 => "table2",
            Command::Sweep => "sweep",
            Command::Asympt => "asympt",
            Command::Check { .. } => "check",
        }
    }
}

fn load_config(cli: &Cli) -> Result<JobConfig, CliError> {
    let cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            JobConfig::parse(&text)?
        }
        None => JobConfig::default(),
    };
    if let Some(cmd) = &cfg.command {
        if cmd != cli.command.name() {
            return Err(CliError::Config(format!(
                "config is for command {cmd:?}, not {:?}",
                cli.command.name()
            )));
        }
    }
    Ok(cfg)
}

/// Run a parsed command line and render its output.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let cfg = load_config(cli)?;
    let output = match &cli.command {
        Command::Solve => commands::solve(&cfg)?,
        Command::Table1 => commands::table_one(&cfg, cli.round)?,
        Command::Table2 => commands::table_two(&cfg, cli.round)?,
        Command::Sweep => commands::sweep(&cfg, cli.round)?,
        Command::Asympt => commands::asympt(&cfg)?,
        Command::Check { design } => commands::check(&cfg, design.as_deref())?,
    };
    let format = cli.format.or(cfg.output.format).unwrap_or_default();
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&output.json)
                .map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => output.csv,
    };
    if let Some(path) = cli.out.as_ref().or(cfg.output.path.as_ref()) {
        std::fs::write(path, &text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(String::new())
    } else {
        Ok(text)
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).is_err() {
                return 1;
            }
            0
        }
        Err(e) => {
            let doc = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{doc}");
            e.exit_code()
        }
    }
}
