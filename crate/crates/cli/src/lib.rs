//! Command-line front end for the `modecluster` library. Every command
//! prints JSON (or a bare number for `bandwidth`) on stdout and writes
//! larger artifacts to files.

pub mod args;
mod cluster;
mod commands;
mod reproduce;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numerical,
}

impl ErrorKind {
    pub fn exit_code(self) -> u8 {
        match self {
            ErrorKind::Usage => 2,
            ErrorKind::Data => 3,
            ErrorKind::Numerical => 4,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Usage,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Data,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Numerical,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<modecluster::Error> for CliError {
    fn from(e: modecluster::Error) -> Self {
        use modecluster::Error as E;
        let kind = match e {
            E::InvalidParameter { .. } => ErrorKind::Usage,
            E::Degenerate(_) => ErrorKind::Numerical,
            _ => ErrorKind::Data,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Parse `args`, run the command, print its output, and map failures to
/// exit codes (2 usage, 3 data, 4 numerical).
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.kind.exit_code())
        }
    }
}

/// Run a parsed command inside a pool of the requested size and return
/// what it would print.
pub fn execute(cli: &Cli) -> CliResult<String> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::usage("--threads must be >= 1"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {:?} threads: {e}", cli.threads)))?;
    pool.install(|| match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Cluster(a) => cluster::cluster(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Bandwidth(a) => commands::bandwidth(a),
        Command::GmsScan(a) => commands::gms_scan(a),
        Command::Reproduce(a) => reproduce::reproduce(a),
    })
}

pub(crate) fn to_json<T: serde::Serialize>(v: &T) -> CliResult<String> {
    serde_json::to_string_pretty(v)
        .map_err(|e| CliError::numerical(format!("cannot encode report: {e}")))
}

pub(crate) fn display(p: &Path) -> String {
    p.display().to_string()
}

/// `dir/<stem of base><suffix>`.
pub(crate) fn sibling(base: &Path, suffix: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    base.with_file_name(format!("{stem}{suffix}"))
}

pub(crate) fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}
