//! Reading and writing of per-iteration trace files.
//!
//! A campaign produces one `traces.csv` holding every iteration row of every
//! (input, restart) pair, plus one whitespace-separated points file per run
//! under `points/` with the raw iterate coordinates for geometry analytics.

use acg_core::{AttackTrace, IterationRecord};
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

/// One row of `traces.csv`: an [`IterationRecord`] tagged with which input
/// (`run_id`) and which restart it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub run_id: usize,
    pub restart: usize,
    pub iter: usize,
    pub loss: f64,
    pub f_max: f64,
    pub eta: f64,
    pub beta: f64,
    /// Class currently targeted by the margin objective, empty when the
    /// objective has no class structure.
    pub ctc: Option<usize>,
    pub move_dist: f64,
    pub proj_ratio: f64,
    pub halved: bool,
}

/// Flatten one attack trace into tagged CSV rows.
pub fn rows_from_trace(run_id: usize, restart: usize, trace: &AttackTrace) -> Vec<TraceRow> {
    trace
        .rows
        .iter()
        .map(|r: &IterationRecord| TraceRow {
            run_id,
            restart,
            iter: r.iter,
            loss: r.loss,
            f_max: r.f_max,
            eta: r.eta,
            beta: r.beta,
            ctc: r.ctc,
            move_dist: r.move_dist,
            proj_ratio: r.proj_ratio,
            halved: r.halved,
        })
        .collect()
}

pub fn write_traces_csv(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_traces_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        rows.push(record.with_context(|| format!("malformed row in {}", path.display()))?);
    }
    Ok(rows)
}

/// File name of the iterate dump for one (input, restart) pair.
pub fn points_file_name(run_id: usize, restart: usize) -> String {
    format!("run{run_id:04}_restart{restart}.txt")
}

/// Write iterates one point per line, coordinates whitespace-separated, in
/// shortest-roundtrip decimal so re-reading reproduces the exact values.
pub fn write_points(path: &Path, points: &[Vec<f64>]) -> Result<()> {
    let mut out = String::new();
    for point in points {
        let mut first = true;
        for c in point {
            if !first {
                out.push(' ');
            }
            out.push_str(&format!("{c}"));
            first = false;
        }
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let coords: std::result::Result<Vec<f64>, _> =
            line.split_whitespace().map(str::parse::<f64>).collect();
        points.push(
            coords.with_context(|| format!("{} line {}: not a point", path.display(), i + 1))?,
        );
    }
    Ok(points)
}

/// Deletes the files it was told about unless [`OutputGuard::keep`] is
/// called, so an aborted campaign does not leave behind a directory that
/// looks complete.
pub struct OutputGuard {
    files: Vec<PathBuf>,
    armed: bool,
}

impl OutputGuard {
    pub fn new() -> Self {
        Self {
            files: Vec::new(),
            armed: true,
        }
    }

    pub fn track(&mut self, path: &Path) {
        self.files.push(path.to_path_buf());
    }

    /// Declare the output set complete: nothing is deleted on drop.
    pub fn keep(mut self) {
        self.armed = false;
    }
}

impl Default for OutputGuard {
    fn default() -> Self {
        Self::new()
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if !self.armed {
            return;
        }
        for path in &self.files {
            if let Err(err) = fs::remove_file(path) {
                if path.exists() {
                    log::warn!("could not clean up {}: {err}", path.display());
                }
            }
        }
    }
}
