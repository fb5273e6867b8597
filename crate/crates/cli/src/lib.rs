//! Command layer of the `kindex` binary.
//!
//! Each subcommand is a function from a validated [`RunConfig`] to output
//! bytes plus an exit [`Status`]. Data goes to standard output (or
//! `--output`), diagnostics to standard error.

pub mod args;
pub mod commands;
mod table;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use kindex_core::graph::GraphError;
use kindex_core::ranking::{RankingError, StatsError};
use kindex_core::synthgen::SynthError;
use kindex_core::IngestError;
use thiserror::Error;

pub use args::{Format, RunConfig, SubcommandKind};

/// Process exit status: 0 success, 1 warnings, 2 fatal.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    #[default]
    Success = 0,
    Warnings = 1,
    Fatal = 2,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ranking(#[from] RankingError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("{path}: {source}")]
    Output { path: String, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Command output before it is written anywhere.
#[derive(Debug, Default)]
pub struct Outcome {
    pub status: Status,
    pub data: Vec<u8>,
    pub diagnostics: Vec<String>,
}

/// Runs one subcommand against an already validated configuration.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.subcommand {
        SubcommandKind::Validate => commands::cmd_validate(cfg),
        SubcommandKind::Index => commands::cmd_index(cfg),
        SubcommandKind::Rank => commands::cmd_rank(cfg),
        SubcommandKind::Stats => commands::cmd_stats(cfg),
        SubcommandKind::Scatter => commands::cmd_scatter(cfg),
        SubcommandKind::Generate => commands::cmd_generate(cfg),
    }
}

/// Parses `argv`, runs the command and writes its results. Returns the exit
/// code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::parse_from(argv) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { Status::Fatal.code() } else { 0 };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match cfg.validate().and_then(|cfg| {
        let outcome = execute(&cfg)?;
        emit(&cfg, &outcome, stdout)?;
        Ok(outcome)
    }) {
        Ok(outcome) => {
            for d in &outcome.diagnostics {
                let _ = writeln!(stderr, "{d}");
            }
            outcome.status.code()
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            Status::Fatal.code()
        }
    }
}

fn emit(cfg: &RunConfig, outcome: &Outcome, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.output {
        Some(path) => {
            let wrap = |source| CliError::Output {
                path: path.display().to_string(),
                source,
            };
            let mut f = BufWriter::new(File::create(path).map_err(wrap)?);
            f.write_all(&outcome.data).map_err(wrap)?;
            f.flush().map_err(wrap)?;
        }
        None => {
            stdout.write_all(&outcome.data)?;
            stdout.flush()?;
        }
    }
    Ok(())
}
