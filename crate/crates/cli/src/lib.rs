//! Command-line sweeps over the `qfi-probe` library: QFI curves, scheme
//! thresholds, partial-entanglement sweeps and Cramér–Rao experiments, all
//! written as CSV.

#![forbid(unsafe_code)]

pub mod commands;
pub mod config;
pub mod error;
pub mod format;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

pub use config::{Command, RunConfig, SchemeName, ThetaGrid};
pub use error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Path of the manifest written next to `csv`.
pub fn manifest_path(csv: &std::path::Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}

/// Renders the CSV and writes it to `cfg.out` (plus its manifest) or to
/// standard output.
pub fn execute(cfg: &RunConfig) -> Result<(), CliError> {
    let csv = commands::render(cfg)?;
    match &cfg.out {
        Some(path) => {
            fs::write(path, &csv)?;
            fs::write(manifest_path(path), cfg.manifest(VERSION))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(csv.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
