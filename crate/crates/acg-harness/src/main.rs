//! `acg` — command-line front end for the attack engine and its analytics.

use acg_core::{
    cg_quadratic_minimize, diversity_index, gaussian_blobs, run_attack, train_toy, two_moons,
    AttackConfig, BetaRule, Dataset, FeasibleRegion, Method, MlpClassifier, MultimodalSurface,
    Quadratic, TrainConfig,
};
use acg_harness::{
    asr_curve, build_aggregate, ctc_table, di_table, distance_curve, points_file_name,
    read_inputs_csv, read_points, read_traces_csv, rows_from_trace, run_campaign,
    write_aggregate_json, write_inputs_csv, write_points, write_traces_csv, CampaignSettings,
    InputRecord, OutputGuard, TraceRow,
};
use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "acg",
    version,
    about = "Box-constrained attack engine with conjugate-direction search, plus analytics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DatasetKind {
    Moons,
    Blobs,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodKind {
    Acg,
    Apgd,
    HybridGd2cg,
    HybridCg2gd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum BetaKind {
    Fr,
    Pr,
    Hs,
    Dy,
    Hz,
    Dl,
    Ls,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ReportKind {
    Asr,
    Ctc,
    Distance,
    Di,
}

#[derive(Subcommand)]
enum Command {
    /// Train a small ReLU classifier on a synthetic 2-D dataset.
    TrainToy {
        /// Which synthetic dataset to generate.
        #[arg(long, value_enum, default_value_t = DatasetKind::Moons)]
        dataset: DatasetKind,
        /// Layer widths, comma separated, e.g. "2,16,2".
        #[arg(long, default_value = "2,16,2")]
        arch: String,
        #[arg(long, default_value_t = 300)]
        epochs: usize,
        #[arg(long, default_value_t = 0.1)]
        lr: f64,
        #[arg(long, default_value_t = 32)]
        batch_size: usize,
        /// Seed for data generation, weight init and shuffling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 400)]
        samples: usize,
        /// Noise level (moons) or cluster spread (blobs).
        #[arg(long, default_value_t = 0.08)]
        noise: f64,
        /// Number of classes (blobs only; moons is always 2).
        #[arg(long, default_value_t = 2)]
        classes: usize,
        /// Where to write the model JSON.
        #[arg(long)]
        out: PathBuf,
        /// Optionally write the generated dataset as an inputs CSV.
        #[arg(long)]
        data_out: Option<PathBuf>,
    },
    /// Attack every input in a CSV with per-input restarts; write traces,
    /// iterates and an aggregate report into a directory.
    Attack {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        inputs: PathBuf,
        /// Budget: feasible region is the eps-box around each input,
        /// clipped to the unit cube.
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
        #[arg(long, value_enum, default_value_t = MethodKind::Acg)]
        method: MethodKind,
        #[arg(long, value_enum, default_value_t = BetaKind::Hs)]
        beta: BetaKind,
        /// Clip negative conjugate coefficients to zero.
        #[arg(long)]
        nonneg_beta: bool,
        /// Step-size threshold for hybrid methods (required with them).
        #[arg(long)]
        switch_eta: Option<f64>,
        /// Direction-memory weight for the dl coefficient rule.
        #[arg(long, default_value_t = 0.1)]
        dl_t: f64,
        /// Initial step size; defaults to twice the budget.
        #[arg(long)]
        eta0: Option<f64>,
        /// Momentum blend for the gradient-family update.
        #[arg(long, default_value_t = 0.75)]
        alpha: f64,
        /// Improvement-rate threshold of the step-size checkpoints.
        #[arg(long, default_value_t = 0.75)]
        rho: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
        /// Also emit SVG charts of the success-rate and movement curves.
        #[arg(long)]
        charts: bool,
    },
    /// Compute a report from a finished campaign directory, or the
    /// diversity index of a standalone point cloud.
    Analyze {
        /// Path to a campaign's traces.csv (its directory must hold
        /// aggregate.json and points/ for the di report).
        #[arg(long, conflicts_with = "cloud", required_unless_present = "cloud")]
        traces: Option<PathBuf>,
        /// Path to a standalone points file (di report only).
        #[arg(long)]
        cloud: Option<PathBuf>,
        #[arg(long, value_enum)]
        report: ReportKind,
        /// Sliding-window length for the di report.
        #[arg(long, default_value_t = 10)]
        window: usize,
        /// Distance scale for --cloud (the campaign's region diameters are
        /// used with --traces).
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify the quadratic minimizer: random SPD instances over a range of
    /// dimensions must converge within the dimension's iteration budget.
    CgCheck {
        /// Largest dimension to test (sweep starts at 2).
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Instances per dimension.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Single-run demo on a closed-form multimodal surface over the unit
    /// square; writes a trace CSV plus an iterate sidecar.
    MultimodalDemo {
        #[arg(long, value_enum, default_value_t = MethodKind::Acg)]
        method: MethodKind,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Runtime(err) => write!(f, "{err:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        CliError::Runtime(err)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(CliError::Runtime(err)) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::TrainToy {
            dataset,
            arch,
            epochs,
            lr,
            batch_size,
            seed,
            samples,
            noise,
            classes,
            out,
            data_out,
        } => cmd_train_toy(
            dataset,
            &arch,
            epochs,
            lr,
            batch_size,
            seed,
            samples,
            noise,
            classes,
            &out,
            data_out.as_deref(),
        ),
        Command::Attack {
            model,
            inputs,
            eps,
            iters,
            restarts,
            method,
            beta,
            nonneg_beta,
            switch_eta,
            dl_t,
            eta0,
            alpha,
            rho,
            seed,
            out_dir,
            charts,
        } => {
            let method = resolve_method(method, switch_eta)?;
            let beta = resolve_beta(beta, dl_t);
            let config = AttackConfig {
                method,
                beta,
                nonneg_beta,
                n_iter: iters,
                eta0,
                rho,
                alpha,
                ..AttackConfig::default()
            };
            cmd_attack(
                &model, &inputs, eps, config, restarts, seed, &out_dir, charts,
            )
        }
        Command::Analyze {
            traces,
            cloud,
            report,
            window,
            m,
            out,
        } => cmd_analyze(traces.as_deref(), cloud.as_deref(), report, window, m, &out),
        Command::CgCheck { n, trials, seed } => cmd_cg_check(n, trials, seed),
        Command::MultimodalDemo { method, iters, out } => {
            let method = resolve_method(method, None)?;
            cmd_multimodal_demo(method, iters, &out)
        }
    }
}

fn resolve_method(kind: MethodKind, switch_eta: Option<f64>) -> Result<Method, CliError> {
    match (kind, switch_eta) {
        (MethodKind::Acg, None) => Ok(Method::Acg),
        (MethodKind::Apgd, None) => Ok(Method::Apgd),
        (MethodKind::HybridGd2cg, Some(switch_eta)) => Ok(Method::HybridGdToCg { switch_eta }),
        (MethodKind::HybridCg2gd, Some(switch_eta)) => Ok(Method::HybridCgToGd { switch_eta }),
        (MethodKind::HybridGd2cg | MethodKind::HybridCg2gd, None) => Err(usage(
            "--switch-eta is required for hybrid methods (the step-size handover threshold)",
        )),
        (_, Some(_)) => Err(usage("--switch-eta only applies to hybrid methods")),
    }
}

fn resolve_beta(kind: BetaKind, dl_t: f64) -> BetaRule {
    match kind {
        BetaKind::Fr => BetaRule::FletcherReeves,
        BetaKind::Pr => BetaRule::PolakRibiere,
        BetaKind::Hs => BetaRule::HestenesStiefel,
        BetaKind::Dy => BetaRule::DaiYuan,
        BetaKind::Hz => BetaRule::HagerZhang,
        BetaKind::Dl => BetaRule::DaiLiao { t: dl_t },
        BetaKind::Ls => BetaRule::LiuStorey,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_train_toy(
    dataset: DatasetKind,
    arch: &str,
    epochs: usize,
    lr: f64,
    batch_size: usize,
    seed: u64,
    samples: usize,
    noise: f64,
    classes: usize,
    out: &Path,
    data_out: Option<&Path>,
) -> Result<(), CliError> {
    let arch: Vec<usize> = arch
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| {
            usage(format!(
                "--arch must be comma-separated widths, got {arch:?}"
            ))
        })?;
    if samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let data: Dataset = match dataset {
        DatasetKind::Moons => {
            if classes != 2 {
                return Err(usage("the moons dataset always has 2 classes"));
            }
            two_moons(samples, noise, seed)
        }
        DatasetKind::Blobs => {
            if classes < 2 {
                return Err(usage("--classes must be at least 2"));
            }
            gaussian_blobs(samples, classes, noise, seed)
        }
    };
    let cfg = TrainConfig {
        epochs,
        lr,
        batch_size,
        seed,
    };
    let outcome = train_toy(&data, &arch, &cfg).map_err(|e| usage(e.to_string()))?;
    outcome
        .model
        .save(out)
        .with_context(|| format!("cannot write model to {}", out.display()))
        .map_err(CliError::Runtime)?;
    if let Some(data_path) = data_out {
        let inputs: Vec<InputRecord> = data
            .points
            .iter()
            .zip(&data.labels)
            .map(|(p, &l)| InputRecord {
                point: p.clone(),
                label: l,
            })
            .collect();
        write_inputs_csv(data_path, &inputs)?;
    }
    let final_loss = outcome.epoch_losses.last().copied().unwrap_or(f64::NAN);
    println!(
        "trained {} epochs: accuracy {:.4}, final loss {:.6}, model -> {}",
        epochs,
        outcome.train_accuracy,
        final_loss,
        out.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_attack(
    model_path: &Path,
    inputs_path: &Path,
    eps: f64,
    attack: AttackConfig,
    restarts: usize,
    seed: u64,
    out_dir: &Path,
    charts: bool,
) -> Result<(), CliError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(usage("--eps must be a positive number"));
    }
    if restarts == 0 {
        return Err(usage("--restarts must be at least 1"));
    }
    let model = MlpClassifier::load(model_path)
        .with_context(|| format!("cannot load model {}", model_path.display()))?;
    let inputs = read_inputs_csv(inputs_path)?;
    let settings = CampaignSettings {
        eps,
        attack,
        restarts,
        seed,
    };
    let outcomes = run_campaign(&model, &inputs, &settings).map_err(CliError::Runtime)?;

    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    let points_dir = out_dir.join("points");
    std::fs::create_dir_all(&points_dir)
        .with_context(|| format!("cannot create {}", points_dir.display()))?;

    let mut guard = OutputGuard::new();
    let mut rows: Vec<TraceRow> = Vec::new();
    for outcome in &outcomes {
        for (r, trace) in outcome.traces.iter().enumerate() {
            let restart = r + 1;
            rows.extend(rows_from_trace(outcome.input_index, restart, trace));
            let path = points_dir.join(points_file_name(outcome.input_index, restart));
            guard.track(&path);
            write_points(&path, &trace.points)?;
        }
    }
    let traces_path = out_dir.join("traces.csv");
    guard.track(&traces_path);
    write_traces_csv(&traces_path, &rows)?;

    let aggregate = build_aggregate(&outcomes, &settings);
    let aggregate_path = out_dir.join("aggregate.json");
    guard.track(&aggregate_path);
    write_aggregate_json(&aggregate_path, &aggregate)?;

    if charts {
        let curve = asr_curve(&rows);
        let asr_points: Vec<(f64, f64)> = curve
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as f64, v))
            .collect();
        let asr_path = out_dir.join("asr_curve.svg");
        guard.track(&asr_path);
        acg_harness::svg::write_chart(
            &asr_path,
            "attack success rate over the restart-major timeline",
            "timeline position",
            "success rate",
            &[acg_harness::svg::Series {
                name: "asr",
                points: &asr_points,
            }],
        )?;

        let dist = distance_curve(&rows);
        let move_points: Vec<(f64, f64)> =
            dist.iter().map(|d| (d.iter as f64, d.mean_move)).collect();
        let proj_points: Vec<(f64, f64)> = dist
            .iter()
            .map(|d| (d.iter as f64, d.mean_proj_ratio))
            .collect();
        let dist_path = out_dir.join("distance_curve.svg");
        guard.track(&dist_path);
        acg_harness::svg::write_chart(
            &dist_path,
            "mean movement per iteration",
            "iteration",
            "distance",
            &[
                acg_harness::svg::Series {
                    name: "move",
                    points: &move_points,
                },
                acg_harness::svg::Series {
                    name: "projection",
                    points: &proj_points,
                },
            ],
        )?;
    }
    guard.keep();

    println!(
        "attacked {} inputs ({} restartsx{} iterations, method {}): asr {:.4}, mean targeted-class switches {:.3}",
        aggregate.n_inputs,
        aggregate.restarts,
        aggregate.iters,
        aggregate.method,
        aggregate.asr,
        aggregate.mean_ctc_switches
    );
    println!("wrote {}", out_dir.display());
    Ok(())
}

fn cmd_analyze(
    traces: Option<&Path>,
    cloud: Option<&Path>,
    report: ReportKind,
    window: usize,
    m: Option<f64>,
    out: &Path,
) -> Result<(), CliError> {
    if window < 3 {
        return Err(usage(
            "--window must be at least 3 (a window needs 3 points)",
        ));
    }
    if let Some(cloud_path) = cloud {
        if report != ReportKind::Di {
            return Err(usage("--cloud only supports --report di"));
        }
        let m = m.ok_or_else(|| usage("--m (distance scale) is required with --cloud"))?;
        let points = read_points(cloud_path)?;
        let di = diversity_index(&points, m).map_err(|e| CliError::Runtime(e.into()))?;
        let mut writer = csv::Writer::from_path(out)
            .with_context(|| format!("cannot create {}", out.display()))?;
        writer
            .write_record(["n_points", "m", "di"])
            .map_err(anyhow::Error::from)?;
        writer
            .write_record([format!("{}", points.len()), format!("{m}"), format!("{di}")])
            .map_err(anyhow::Error::from)?;
        writer.flush().map_err(anyhow::Error::from)?;
        println!(
            "di {di} over {} points (m {m}) -> {}",
            points.len(),
            out.display()
        );
        return Ok(());
    }

    let traces_path = traces.expect("clap enforces --traces XOR --cloud");
    if m.is_some() {
        return Err(usage(
            "--m only applies to --cloud; campaign reports use each input's region diameter",
        ));
    }
    let rows = read_traces_csv(traces_path)?;
    if rows.is_empty() {
        return Err(CliError::Runtime(anyhow::anyhow!(
            "{}: no trace rows",
            traces_path.display()
        )));
    }
    match report {
        ReportKind::Asr => {
            let curve = asr_curve(&rows);
            let mut writer = csv::Writer::from_path(out)
                .with_context(|| format!("cannot create {}", out.display()))?;
            writer
                .write_record(["position", "asr"])
                .map_err(anyhow::Error::from)?;
            for (i, v) in curve.iter().enumerate() {
                writer
                    .write_record([format!("{i}"), format!("{v}")])
                    .map_err(anyhow::Error::from)?;
            }
            writer.flush().map_err(anyhow::Error::from)?;
            println!(
                "asr curve with {} positions, final {} -> {}",
                curve.len(),
                curve.last().unwrap(),
                out.display()
            );
        }
        ReportKind::Ctc => {
            let table = ctc_table(&rows);
            write_serializable_csv(out, &table)?;
            let switched = table.iter().filter(|r| r.switched).count();
            println!(
                "targeted-class switches for {} inputs ({} switched at least once) -> {}",
                table.len(),
                switched,
                out.display()
            );
        }
        ReportKind::Distance => {
            let curve = distance_curve(&rows);
            write_serializable_csv(out, &curve)?;
            println!(
                "movement profile over {} iterations -> {}",
                curve.len(),
                out.display()
            );
        }
        ReportKind::Di => {
            let dir = traces_path.parent().unwrap_or(Path::new("."));
            let table = di_table(dir, window)?;
            write_serializable_csv(out, &table)?;
            let mean = table.iter().map(|r| r.mean_di).sum::<f64>() / table.len().max(1) as f64;
            println!(
                "windowed diversity (window {window}) for {} runs, mean {mean:.6} -> {}",
                table.len(),
                out.display()
            );
        }
    }
    Ok(())
}

fn write_serializable_csv<T: serde::Serialize>(out: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut writer =
        csv::Writer::from_path(out).with_context(|| format!("cannot create {}", out.display()))?;
    for row in rows {
        writer.serialize(row).map_err(anyhow::Error::from)?;
    }
    writer.flush().map_err(anyhow::Error::from)?;
    Ok(())
}

fn cmd_cg_check(n_max: usize, trials: usize, seed: u64) -> Result<(), CliError> {
    if n_max < 2 {
        return Err(usage("--n must be at least 2"));
    }
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let mut failures = 0usize;
    for n in 2..=n_max {
        let mut worst_iters = 0usize;
        let mut worst_grad: f64 = 0.0;
        for t in 0..trials {
            let instance_seed = seed.wrapping_add((n as u64) << 32).wrapping_add(t as u64);
            let q = Quadratic::random_spd(n, instance_seed);
            let outcome = cg_quadratic_minimize(&q, &vec![0.0; n], n, 1e-10);
            worst_iters = worst_iters.max(outcome.iterations);
            worst_grad = worst_grad.max(outcome.grad_norm);
            if outcome.grad_norm > 1e-8 {
                failures += 1;
            }
        }
        println!(
            "n={n:2} trials={trials}: worst iterations {worst_iters:2}, worst final |grad| {worst_grad:.3e}"
        );
    }
    if failures > 0 {
        return Err(CliError::Runtime(anyhow::anyhow!(
            "{failures} instances did not reach |grad| <= 1e-8 within the dimension budget"
        )));
    }
    println!("all instances converged within their dimension budget");
    Ok(())
}

fn cmd_multimodal_demo(method: Method, iters: usize, out: &Path) -> Result<(), CliError> {
    if iters == 0 {
        return Err(usage("--iters must be at least 1"));
    }
    let region = FeasibleRegion::new(&[0.5, 0.5], 0.5).expect("static region is valid");
    let config = AttackConfig {
        method,
        n_iter: iters,
        ..AttackConfig::default()
    };
    let trace = run_attack(&MultimodalSurface, &region, &region.center(), &config)
        .map_err(|e| CliError::Runtime(e.into()))?;

    let mut guard = OutputGuard::new();
    guard.track(out);
    write_traces_csv(out, &rows_from_trace(0, 1, &trace))?;
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trace".into());
    let sidecar = out.with_file_name(format!("{stem}.points.txt"));
    guard.track(&sidecar);
    write_points(&sidecar, &trace.points)?;
    guard.keep();

    println!(
        "best value {} at ({}, {}) after {} iterations -> {}",
        trace.best_value,
        trace.best_point[0],
        trace.best_point[1],
        iters,
        out.display()
    );
    Ok(())
}
