//! Writes an experiment's output directory.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::experiments::{self, Outcome};
use crate::manifest::{self, MANIFEST_NAME};
use crate::plot::{emit_plot, SeriesSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub out_dir: PathBuf,
    /// Every written file except the manifest, in write order.
    pub files: Vec<String>,
    pub summary: Vec<String>,
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Output { path: path.to_path_buf(), source })
}

/// Computes the experiment, then writes CSVs, plots and the manifest.
/// Nothing is written if the computation fails.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let outcome = experiments::run(cfg)?;
    write_outcome(cfg, outcome)
}

pub fn write_outcome(cfg: &ExperimentConfig, outcome: Outcome) -> Result<RunReport, CliError> {
    let dir = cfg.out.clone();
    fs::create_dir_all(&dir).map_err(|source| CliError::Output { path: dir.clone(), source })?;
    let mut files = Vec::new();
    for c in &outcome.csv {
        write(&dir.join(&c.name), &c.text)?;
        files.push(c.name.clone());
    }
    for p in &outcome.plots {
        let specs: Vec<SeriesSpec> = p
            .series
            .iter()
            .map(|s| SeriesSpec { label: s.label.clone(), csv: dir.join(&s.csv), x: s.x.clone(), y: s.y.clone() })
            .collect();
        emit_plot(&specs, &dir.join(&p.file), &p.options)?;
        files.push(p.file.clone());
    }
    let text = manifest::build(&dir, &files, &cfg.describe())?;
    write(&dir.join(MANIFEST_NAME), &text)?;
    Ok(RunReport { out_dir: dir, files, summary: outcome.summary })
}
