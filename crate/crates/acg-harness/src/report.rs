//! Campaign analytics: success-rate curves, class-targeting statistics,
//! movement profiles, and trajectory diversity, all computed from the files
//! a campaign writes (so they can be recomputed offline).
//!
//! Everything here iterates in deterministic order (sorted keys, explicit
//! file-name construction) so reports are byte-stable across runs and
//! thread counts.

use crate::campaign::{CampaignSettings, InputOutcome};
use crate::tracefile::{points_file_name, read_points, TraceRow};
use acg_core::di_trace;
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerInputReport {
    pub input: usize,
    pub label: usize,
    pub success: bool,
    pub restarts_used: usize,
    pub best_value: f64,
    pub region_m: f64,
    /// Number of times the targeted runner-up class changed along the
    /// first restart's trajectory.
    pub ctc_switches: usize,
    pub ctc_switched: bool,
    pub final_ctc: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub n_inputs: usize,
    pub eps: f64,
    pub iters: usize,
    pub restarts: usize,
    pub method: String,
    pub beta: String,
    pub nonneg_beta: bool,
    pub seed: u64,
    /// Fraction of inputs with a successful perturbation in any restart.
    pub asr: f64,
    pub mean_ctc_switches: f64,
    pub frac_inputs_switched: f64,
    pub per_input: Vec<PerInputReport>,
}

/// Count changes in the targeted class along one trajectory. Only
/// transitions between two known classes count; the objective may have no
/// class structure at all, in which case there is nothing to count.
pub fn count_ctc_switches<I: IntoIterator<Item = Option<usize>>>(
    ctcs: I,
) -> (usize, Option<usize>) {
    let mut switches = 0usize;
    let mut prev: Option<usize> = None;
    let mut last: Option<usize> = None;
    for ctc in ctcs {
        if let (Some(p), Some(c)) = (prev, ctc) {
            if p != c {
                switches += 1;
            }
        }
        if ctc.is_some() {
            prev = ctc;
        }
        last = ctc;
    }
    (switches, last)
}

pub fn build_aggregate(outcomes: &[InputOutcome], settings: &CampaignSettings) -> AggregateReport {
    let per_input: Vec<PerInputReport> = outcomes
        .iter()
        .map(|o| {
            let first = &o.traces[0];
            let (switches, final_ctc) = count_ctc_switches(first.rows.iter().map(|r| r.ctc));
            PerInputReport {
                input: o.input_index,
                label: o.label,
                success: o.success,
                restarts_used: o.restarts_used,
                best_value: o.best_value,
                region_m: o.region_m,
                ctc_switches: switches,
                ctc_switched: switches > 0,
                final_ctc,
            }
        })
        .collect();

    let n = per_input.len();
    let mean_switches = per_input.iter().map(|p| p.ctc_switches as f64).sum::<f64>() / n as f64;
    let frac_switched = per_input.iter().filter(|p| p.ctc_switched).count() as f64 / n as f64;
    AggregateReport {
        n_inputs: n,
        eps: settings.eps,
        iters: settings.attack.n_iter,
        restarts: settings.restarts,
        method: settings.attack.method.to_string(),
        beta: settings.attack.beta.to_string(),
        nonneg_beta: settings.attack.nonneg_beta,
        seed: settings.seed,
        asr: crate::campaign::attack_success_rate(outcomes),
        mean_ctc_switches: mean_switches,
        frac_inputs_switched: frac_switched,
        per_input,
    }
}

pub fn write_aggregate_json(path: &Path, report: &AggregateReport) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    std::fs::write(path, text + "\n")
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn read_aggregate_json(path: &Path) -> Result<AggregateReport> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("malformed report {}", path.display()))
}

fn grouped_by_run(rows: &[TraceRow]) -> BTreeMap<usize, Vec<&TraceRow>> {
    let mut groups: BTreeMap<usize, Vec<&TraceRow>> = BTreeMap::new();
    for row in rows {
        groups.entry(row.run_id).or_default().push(row);
    }
    for rows in groups.values_mut() {
        rows.sort_by_key(|r| (r.restart, r.iter));
    }
    groups
}

/// Attack-success-rate curve over a restart-major iteration timeline.
///
/// For each input, all its restart trajectories are concatenated in restart
/// order and scanned cumulatively: once any iterate reaches the success
/// threshold the input counts as broken from that position onward. The
/// curve is the mean of these 0/1 timelines across inputs (shorter
/// timelines hold their final value), so it is non-decreasing and its last
/// entry equals the overall success rate.
pub fn asr_curve(rows: &[TraceRow]) -> Vec<f64> {
    let groups = grouped_by_run(rows);
    let timelines: Vec<Vec<f64>> = groups
        .values()
        .map(|rows| {
            let mut broken = false;
            rows.iter()
                .map(|r| {
                    broken = broken || r.loss >= 0.0;
                    if broken {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let max_len = timelines.iter().map(Vec::len).max().unwrap_or(0);
    (0..max_len)
        .map(|t| {
            let sum: f64 = timelines
                .iter()
                .map(|tl| *tl.get(t).or(tl.last()).unwrap_or(&0.0))
                .sum();
            sum / timelines.len() as f64
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistancePoint {
    pub iter: usize,
    pub mean_move: f64,
    pub mean_proj_ratio: f64,
}

/// Mean per-iteration movement and projection displacement across every
/// (input, restart) trajectory.
pub fn distance_curve(rows: &[TraceRow]) -> Vec<DistancePoint> {
    let mut acc: BTreeMap<usize, (f64, f64, usize)> = BTreeMap::new();
    for row in rows {
        let entry = acc.entry(row.iter).or_insert((0.0, 0.0, 0));
        entry.0 += row.move_dist;
        entry.1 += row.proj_ratio;
        entry.2 += 1;
    }
    acc.into_iter()
        .map(|(iter, (mv, pr, n))| DistancePoint {
            iter,
            mean_move: mv / n as f64,
            mean_proj_ratio: pr / n as f64,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CtcRow {
    pub run_id: usize,
    pub switches: usize,
    pub switched: bool,
    pub final_ctc: Option<usize>,
}

/// Targeted-class switching statistics per input, measured on the first
/// restart (the one that starts from the unperturbed input).
pub fn ctc_table(rows: &[TraceRow]) -> Vec<CtcRow> {
    let first_restart: Vec<TraceRow> = rows.iter().filter(|r| r.restart == 1).cloned().collect();
    grouped_by_run(&first_restart)
        .into_iter()
        .map(|(run_id, rows)| {
            let (switches, final_ctc) = count_ctc_switches(rows.iter().map(|r| r.ctc));
            CtcRow {
                run_id,
                switches,
                switched: switches > 0,
                final_ctc,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiRow {
    pub run_id: usize,
    pub restart: usize,
    pub windows: usize,
    pub mean_di: f64,
}

/// Windowed trajectory diversity for every run of a finished campaign
/// directory. The distance scale for each input is its region diameter,
/// read from the aggregate report; iterates come from the points files.
pub fn di_table(out_dir: &Path, window: usize) -> Result<Vec<DiRow>> {
    let aggregate = read_aggregate_json(&out_dir.join("aggregate.json"))?;
    let points_dir = out_dir.join("points");
    if !points_dir.is_dir() {
        bail!("{}: campaign has no points directory", out_dir.display());
    }
    let mut out = Vec::new();
    for input in &aggregate.per_input {
        for restart in 1..=aggregate.restarts {
            let path = points_dir.join(points_file_name(input.input, restart));
            let points = read_points(&path)?;
            let dis = di_trace(&points, window, input.region_m)?;
            let mean = if dis.is_empty() {
                0.0
            } else {
                dis.iter().sum::<f64>() / dis.len() as f64
            };
            out.push(DiRow {
                run_id: input.input,
                restart,
                windows: dis.len(),
                mean_di: mean,
            });
        }
    }
    Ok(out)
}
