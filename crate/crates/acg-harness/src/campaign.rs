//! Running a batch attack over a list of labeled inputs.
//!
//! Every input gets its own feasible region (an eps-box around the input,
//! clipped to the unit cube) and its own deterministic seed derived from the
//! campaign seed, so results do not depend on input order, thread count, or
//! how many inputs precede a given one.

use acg_core::{
    run_restarts, AttackConfig, AttackTrace, FeasibleRegion, MarginObjective, MlpClassifier,
};
use anyhow::{bail, Context, Result};
use std::path::Path;

/// Golden-ratio stride: consecutive input indices get well-separated seeds.
const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq)]
pub struct InputRecord {
    pub point: Vec<f64>,
    pub label: usize,
}

/// Read labeled inputs from CSV: a header row, then one row per input with
/// the coordinates in all but the last column and the class label in the
/// last one.
pub fn read_inputs_csv(path: &Path) -> Result<Vec<InputRecord>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let width = reader.headers()?.len();
    if width < 2 {
        bail!(
            "{}: need at least one coordinate column and a label column",
            path.display()
        );
    }
    let mut inputs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 2; // 1-based, after the header
        if record.len() != width {
            bail!("{} row {row}: expected {width} columns", path.display());
        }
        let mut point = Vec::with_capacity(width - 1);
        for field in record.iter().take(width - 1) {
            point.push(
                field
                    .parse::<f64>()
                    .with_context(|| format!("{} row {row}: bad coordinate", path.display()))?,
            );
        }
        let label = record[width - 1]
            .parse::<usize>()
            .with_context(|| format!("{} row {row}: bad label", path.display()))?;
        inputs.push(InputRecord { point, label });
    }
    Ok(inputs)
}

/// Write labeled inputs in the format [`read_inputs_csv`] accepts.
pub fn write_inputs_csv(path: &Path, inputs: &[InputRecord]) -> Result<()> {
    if inputs.is_empty() {
        bail!("refusing to write an empty input file");
    }
    let dim = inputs[0].point.len();
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    let mut header: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
    header.push("label".into());
    writer.write_record(&header)?;
    for input in inputs {
        let mut record: Vec<String> = input.point.iter().map(|c| format!("{c}")).collect();
        record.push(format!("{}", input.label));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Everything the campaign learned about one input.
#[derive(Debug)]
pub struct InputOutcome {
    pub input_index: usize,
    pub label: usize,
    /// One trace per restart, in restart order (restart 1 starts at the
    /// unperturbed input).
    pub traces: Vec<AttackTrace>,
    /// Best objective value over all restarts.
    pub best_value: f64,
    /// Margin objective: success means the best value reached zero.
    pub success: bool,
    /// 1-based index of the first successful restart, or the restart count
    /// when none succeeded.
    pub restarts_used: usize,
    /// Diameter of this input's feasible region, the natural distance scale
    /// for diversity analytics on its iterates.
    pub region_m: f64,
}

#[derive(Debug, Clone)]
pub struct CampaignSettings {
    pub eps: f64,
    pub attack: AttackConfig,
    pub restarts: usize,
    pub seed: u64,
}

/// Seed for input `i`: well-separated per input, independent of the other
/// inputs, so dropping or reordering rows does not perturb survivors.
pub fn input_seed(campaign_seed: u64, input_index: usize) -> u64 {
    campaign_seed.wrapping_add((input_index as u64).wrapping_mul(SEED_STRIDE))
}

/// Attack every input. All restarts always run (so analytics see the full
/// picture); `restarts_used` reports where a sequential attacker would have
/// stopped.
pub fn run_campaign(
    model: &MlpClassifier,
    inputs: &[InputRecord],
    settings: &CampaignSettings,
) -> Result<Vec<InputOutcome>> {
    if inputs.is_empty() {
        bail!("no inputs to attack");
    }
    for (i, input) in inputs.iter().enumerate() {
        if input.point.len() != model.input_dim {
            bail!(
                "input {i} has {} coordinates, model expects {}",
                input.point.len(),
                model.input_dim
            );
        }
        if input.label >= model.num_classes {
            bail!(
                "input {i} has label {}, model has {} classes",
                input.label,
                model.num_classes
            );
        }
    }

    let indexed: Vec<(usize, &InputRecord)> = inputs.iter().enumerate().collect();
    let outcomes = acg_core::par_map(&indexed, |&(i, input)| -> Result<InputOutcome> {
        let region = FeasibleRegion::new(&input.point, settings.eps)
            .map_err(|e| anyhow::anyhow!("input {i}: {e}"))?;
        let objective = MarginObjective::new(model, input.label)
            .map_err(|e| anyhow::anyhow!("input {i}: {e}"))?;
        let traces = run_restarts(
            &objective,
            &region,
            &input.point,
            &settings.attack,
            settings.restarts,
            input_seed(settings.seed, i),
        )
        .map_err(|e| anyhow::anyhow!("input {i}: {e}"))?;

        let best_value = traces
            .iter()
            .map(|t| t.best_value)
            .fold(f64::NEG_INFINITY, f64::max);
        let restarts_used = traces
            .iter()
            .position(|t| t.best_value >= 0.0)
            .map(|p| p + 1)
            .unwrap_or(traces.len());
        Ok(InputOutcome {
            input_index: i,
            label: input.label,
            best_value,
            success: best_value >= 0.0,
            restarts_used,
            region_m: region.diameter(),
            traces,
        })
    });
    outcomes.into_iter().collect()
}

/// Fraction of inputs for which any restart reached the success threshold.
pub fn attack_success_rate(outcomes: &[InputOutcome]) -> f64 {
    if outcomes.is_empty() {
        return 0.0;
    }
    outcomes.iter().filter(|o| o.success).count() as f64 / outcomes.len() as f64
}
