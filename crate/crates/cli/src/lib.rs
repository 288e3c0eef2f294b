//! `nonloc` command-line front end: JSON configs in, deterministic reports out.
//!
//! Exit codes: 0 on success, 1 when a scenario fails at run time, 2 when the
//! config or the command line is invalid.

use std::fmt;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod report;

use config::{Document, Format};

#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed or invalid configuration.
    Config(String),
    /// The scenario itself failed.
    Scenario(nonloc_core::Error),
    /// The report could not be written.
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Scenario(_) | CliError::Output(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Scenario(e) => write!(f, "scenario error: {e}"),
            CliError::Output(msg) => write!(f, "output error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<nonloc_core::Error> for CliError {
    fn from(e: nonloc_core::Error) -> Self {
        CliError::Scenario(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "nonloc", version, about = "Pre/post-selection, linear optics and Bell nonlocality reports")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a built-in or inline scenario.
    Run(IoArgs),
    /// ABL probabilities for a pre/post-selected ensemble.
    Abl(IoArgs),
    /// CHSH value of a two-spin state, optimized unless angles are given.
    Chsh(IoArgs),
    /// Local hidden variable membership of a behavior table.
    #[command(name = "lhv-check")]
    LhvCheck(IoArgs),
}

#[derive(Debug, clap::Args)]
pub struct IoArgs {
    /// Config file, or `-` for standard input.
    pub config: String,
    /// Overrides the format in the config.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Overrides the output path in the config.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Run(_) => "run",
            Command::Abl(_) => "abl",
            Command::Chsh(_) => "chsh",
            Command::LhvCheck(_) => "lhv-check",
        }
    }

    fn io(&self) -> &IoArgs {
        match self {
            Command::Run(a) | Command::Abl(a) | Command::Chsh(a) | Command::LhvCheck(a) => a,
        }
    }
}

fn read_config(path: &str, stdin: &mut dyn Read) -> Result<String, CliError> {
    let mut text = String::new();
    if path == "-" {
        stdin.read_to_string(&mut text).map_err(|e| CliError::Config(format!("cannot read standard input: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
    }
    Ok(text)
}

fn execute<T: Document>(
    text: &str,
    command: &Command,
    run: impl FnOnce(&T) -> Result<nonloc_core::scenarios::ScenarioResult, CliError>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let doc: T = config::parse(text)?;
    let hash = config::config_hash(&doc);
    let result = run(&doc)?;
    let io = command.io();
    let format = io.format.or(doc.format()).unwrap_or_default();
    let report = report::Report::new(command.name(), &hash, &result);
    let rendered = match format {
        Format::Json => report::to_json(&report),
        Format::Tsv => report::to_tsv(&report),
    };
    match io.output.as_ref().or(doc.output()) {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display()))),
        None => stdout.write_all(rendered.as_bytes()).map_err(|e| CliError::Output(e.to_string())),
    }
}

fn dispatch(command: &Command, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = read_config(&command.io().config, stdin)?;
    match command {
        Command::Run(_) => execute(&text, command, commands::run, stdout),
        Command::Abl(_) => execute(&text, command, commands::abl, stdout),
        Command::Chsh(_) => execute(&text, command, commands::chsh, stdout),
        Command::LhvCheck(_) => execute(&text, command, commands::lhv_check, stdout),
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// exit code.
pub fn main_with<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                2
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    match dispatch(&cli.command, stdin, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "nonloc {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
