//! Batch front end: resolves a [`RunConfig`], computes the requested table
//! and writes it as CSV.
//!
//! Every file starts with a `#` line holding the resolved configuration, so a
//! run can be repeated from its output alone. Numbers use `{:.16e}` (17
//! significant digits) and rows come out in grid order whatever the thread
//! count.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

use std::fs;

use anyhow::{Context, Result};

pub use commands::Table;
pub use config::{Command, Grid, RunConfig, SwitchingSpec};

/// Rendered CSV and the number of rows that failed their check.
#[derive(Debug)]
pub struct Outcome {
    pub csv: String,
    pub failures: usize,
}

/// Runs `cfg` and writes the CSV to `cfg.out` when set.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let table = commands::run_command(cfg).with_context(|| format!("{} failed", cfg.command.name()))?;
    let csv = table.render(&cfg.header());
    if let Some(path) = &cfg.out {
        fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Outcome {
        csv,
        failures: table.failures,
    })
}
