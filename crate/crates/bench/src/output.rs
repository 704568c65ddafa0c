use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::experiments::{CalibrationInfo, Outcome};

/// One aggregated measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: &'static str,
    pub algorithm: &'static str,
    /// Name of the swept parameter (`k`, `l`, `d`, `lambda`, `community`),
    /// empty for single recovery.
    pub parameter: &'static str,
    pub value: String,
    pub mean_f1: f64,
    pub trials: usize,
    pub skipped: usize,
    pub rng_seed: u64,
}

pub fn write_rows<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct Metadata<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a ExperimentConfig,
    pub calibration: Option<CalibrationInfo>,
    pub communities_skipped: usize,
    pub rows: usize,
}

/// `results.csv` -> `results.csv.meta.json`
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    let mut name = csv_path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes the CSV to `path` and the metadata next to it.
pub fn write_outcome(path: &Path, cfg: &ExperimentConfig, outcome: &Outcome) -> Result<()> {
    let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_rows(&outcome.rows, std::io::BufWriter::new(file))?;
    let meta = Metadata {
        tool: "walkscan",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        calibration: outcome.calibration,
        communities_skipped: outcome.skipped,
        rows: outcome.rows.len(),
    };
    let side = sidecar_path(path);
    let mut text = serde_json::to_string_pretty(&meta)?;
    text.push('\n');
    std::fs::write(&side, text).with_context(|| format!("writing {}", side.display()))?;
    Ok(())
}
