//! Campaign harness around the attack engine: batch execution over labeled
//! inputs, deterministic file formats for traces, iterates and aggregate
//! results, and offline analytics (success-rate curves, class-targeting
//! statistics, movement profiles, trajectory diversity) over those files.

pub mod campaign;
pub mod report;
pub mod svg;
pub mod tracefile;

pub use campaign::{
    attack_success_rate, input_seed, read_inputs_csv, run_campaign, write_inputs_csv,
    CampaignSettings, InputOutcome, InputRecord,
};
pub use report::{
    asr_curve, build_aggregate, count_ctc_switches, ctc_table, di_table, distance_curve,
    read_aggregate_json, write_aggregate_json, AggregateReport, CtcRow, DiRow, DistancePoint,
    PerInputReport,
};
pub use tracefile::{
    points_file_name, read_points, read_traces_csv, rows_from_trace, write_points,
    write_traces_csv, OutputGuard, TraceRow,
};
