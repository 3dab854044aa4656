//! Box-constrained maximization engine with automatic step-size control.
//!
//! The engine maximizes an [`Objective`] over a [`FeasibleRegion`] using
//! sign-quantized steps: from iterate `x` it proposes `x + eta * sign(d)` and
//! projects back onto the box. The direction `d` is either the raw gradient
//! plus momentum (`Apgd`) or a conjugate direction `s = g + beta * s_prev`
//! (`Acg`), and the hybrid methods hand over from one family to the other as
//! the step size decays past a threshold.
//!
//! Step-size control follows the checkpoint scheme: at a fixed schedule of
//! iterations the run is inspected and `eta` is halved when progress stalls
//! (too few strict improvements since the last checkpoint, or both `eta` and
//! the running maximum unchanged). On a halving the state is rewound to the
//! best iterate seen so far and the search continues from there.

use crate::beta::{conjugate_coefficient, BetaRule};
use crate::error::{CoreError, Result};
use crate::geometry::FeasibleRegion;
use crate::objective::Objective;
use crate::vecmath::{dist, sign};
use std::fmt;

/// Which update family drives a given iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Sign of the momentum-smoothed gradient.
    Gd,
    /// Sign of the conjugate direction.
    Cg,
}

/// Attack method: a fixed family or a step-size-triggered handover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Conjugate directions throughout.
    Acg,
    /// Momentum gradient sign steps throughout.
    Apgd,
    /// Start with gradient steps, switch to conjugate directions once
    /// `eta <= switch_eta`.
    HybridGdToCg { switch_eta: f64 },
    /// Start with conjugate directions, fall back to gradient steps once
    /// `eta <= switch_eta`.
    HybridCgToGd { switch_eta: f64 },
}

impl Method {
    /// Family in effect at step size `eta`. Thresholds are inclusive: the
    /// post-switch family applies exactly from `eta == switch_eta` downwards.
    pub fn family_at(&self, eta: f64) -> Family {
        match *self {
            Method::Acg => Family::Cg,
            Method::Apgd => Family::Gd,
            Method::HybridGdToCg { switch_eta } => {
                if eta <= switch_eta {
                    Family::Cg
                } else {
                    Family::Gd
                }
            }
            Method::HybridCgToGd { switch_eta } => {
                if eta <= switch_eta {
                    Family::Gd
                } else {
                    Family::Cg
                }
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Acg => write!(f, "acg"),
            Method::Apgd => write!(f, "apgd"),
            Method::HybridGdToCg { switch_eta } => {
                write!(f, "hybrid-gd2cg(switch-eta={switch_eta})")
            }
            Method::HybridCgToGd { switch_eta } => {
                write!(f, "hybrid-cg2gd(switch-eta={switch_eta})")
            }
        }
    }
}

/// Engine configuration. `Default` gives the standard setup: conjugate
/// directions with the Hestenes-Stiefel coefficient, 100 iterations, step
/// size `2 * eps`, checkpoint density `rho = 0.75`, momentum `alpha = 0.75`.
#[derive(Debug, Clone)]
pub struct AttackConfig {
    pub method: Method,
    pub beta: BetaRule,
    /// Clip the conjugate coefficient at zero.
    pub nonneg_beta: bool,
    pub n_iter: usize,
    /// Initial step size; `None` resolves to twice the region's budget
    /// radius (an error for regions built from raw bounds).
    pub eta0: Option<f64>,
    /// Minimum fraction of strictly-improving steps per checkpoint window.
    pub rho: f64,
    /// Checkpoint iterations; `None` resolves to [`checkpoint_schedule`].
    /// A custom schedule must start at 0, increase strictly, and stay within
    /// `n_iter`.
    pub checkpoints: Option<Vec<usize>>,
    /// Momentum weight for the gradient family.
    pub alpha: f64,
    /// Diagnostic switch: run the conjugate machinery but force `beta = 0`,
    /// turning the direction update into `s = g + 0 * s_prev`.
    pub force_beta_zero: bool,
    /// Stop once the objective reports success (running maximum >= 0), for
    /// objectives that support it.
    pub early_stop: bool,
}

impl Default for AttackConfig {
    fn default() -> Self {
        Self {
            method: Method::Acg,
            beta: BetaRule::HestenesStiefel,
            nonneg_beta: false,
            n_iter: 100,
            eta0: None,
            rho: 0.75,
            checkpoints: None,
            alpha: 0.75,
            force_beta_zero: false,
            early_stop: false,
        }
    }
}

impl AttackConfig {
    /// Initial step size for `region`: the explicit override if given,
    /// otherwise twice the budget radius the region was built from.
    pub fn resolved_eta0(&self, region: &FeasibleRegion) -> Result<f64> {
        match self.eta0 {
            Some(e) => {
                if e > 0.0 && e.is_finite() {
                    Ok(e)
                } else {
                    Err(CoreError::InvalidParameter(format!(
                        "eta0 must be positive and finite, got {e}"
                    )))
                }
            }
            None => region.eps().map(|e| 2.0 * e).ok_or_else(|| {
                CoreError::InvalidParameter(
                    "eta0 must be given explicitly for regions built from raw bounds".into(),
                )
            }),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_iter == 0 {
            return Err(CoreError::InvalidParameter("n_iter must be >= 1".into()));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(CoreError::InvalidParameter(format!(
                "rho must lie strictly between 0 and 1, got {}",
                self.rho
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(CoreError::InvalidParameter(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        match self.method {
            Method::HybridGdToCg { switch_eta } | Method::HybridCgToGd { switch_eta }
                if !switch_eta.is_finite() || switch_eta <= 0.0 =>
            {
                return Err(CoreError::InvalidParameter(format!(
                    "switch_eta must be positive and finite, got {switch_eta}"
                )));
            }
            _ => {}
        }
        if let BetaRule::DaiLiao { t } = self.beta {
            if !t.is_finite() || t < 0.0 {
                return Err(CoreError::InvalidParameter(format!(
                    "Dai-Liao weight must be finite and >= 0, got {t}"
                )));
            }
        }
        if let Some(ws) = &self.checkpoints {
            if ws.first() != Some(&0) {
                return Err(CoreError::InvalidParameter(
                    "checkpoint schedule must start at iteration 0".into(),
                ));
            }
            if ws.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CoreError::InvalidParameter(
                    "checkpoint schedule must be strictly increasing".into(),
                ));
            }
            if *ws.last().unwrap() > self.n_iter {
                return Err(CoreError::InvalidParameter(format!(
                    "checkpoint {} exceeds n_iter {}",
                    ws.last().unwrap(),
                    self.n_iter
                )));
            }
        }
        Ok(())
    }
}

/// Checkpoint iterations for a run of `n_iter` steps.
///
/// In fractions of the run the schedule is `p_0 = 0`, `p_1 = 0.22`, then
/// `p_{j+1} = p_j + max(p_j - p_{j-1} - 0.03, 0.06)`; each fraction maps to
/// the iteration `ceil(p_j * n_iter)`. Only checkpoints strictly inside the
/// run are kept, and collisions from rounding are deduplicated, so for small
/// `n_iter` the schedule is short (`n_iter = 1` gives just `[0]`).
pub fn checkpoint_schedule(n_iter: usize) -> Vec<usize> {
    assert!(n_iter >= 1, "checkpoint_schedule: need n_iter >= 1");
    // Work in integer hundredths so the fraction sequence is exact.
    let mut ws = vec![0usize];
    let mut q_prev = 0u128;
    let mut q_cur = 22u128;
    loop {
        let w = (q_cur * n_iter as u128).div_ceil(100) as usize;
        if w >= n_iter {
            break;
        }
        if *ws.last().unwrap() != w {
            ws.push(w);
        }
        let delta = (q_cur - q_prev).saturating_sub(3).max(6);
        q_prev = q_cur;
        q_cur += delta;
    }
    ws
}

/// Per-iteration record of an attack run. Row 0 describes the starting
/// point; row `k + 1` describes iteration `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    /// Objective value at the point evaluated this iteration (recorded
    /// before any rewind to the running best).
    pub loss: f64,
    /// Running maximum after this iteration.
    pub f_max: f64,
    /// Step size in effect for the next iteration (after any halving here).
    pub eta: f64,
    /// Conjugate coefficient used to build the next direction (0 for
    /// gradient-family iterations).
    pub beta: f64,
    /// Class the objective is currently steering toward, when it has one.
    pub ctc: Option<usize>,
    /// Distance moved by this iteration's step.
    pub move_dist: f64,
    /// Projection correction relative to the distance moved (0 when nothing
    /// moved).
    pub proj_ratio: f64,
    /// Whether a checkpoint fired here and halved the step size.
    pub halved: bool,
}

/// Full record of one attack run.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackTrace {
    /// One row per iteration plus the starting row.
    pub rows: Vec<IterationRecord>,
    /// The evaluated iterate of each row (same length as `rows`).
    pub points: Vec<Vec<f64>>,
    /// Feasible point with the highest objective value seen.
    pub best_point: Vec<f64>,
    pub best_value: f64,
}

/// Best-so-far snapshot with enough history to rewind the engine onto it.
#[derive(Debug, Clone)]
struct BestSnapshot {
    point: Vec<f64>,
    value: f64,
    grad: Vec<f64>,
    /// Iterate the best step departed from.
    point_pre: Vec<f64>,
    grad_pre: Vec<f64>,
    /// Direction that produced the best point.
    dir_pre: Vec<f64>,
}

struct EngineState {
    x: Vec<f64>,
    x_prev: Vec<f64>,
    grad: Vec<f64>,
    grad_prev: Vec<f64>,
    dir: Vec<f64>,
    value: f64,
    eta: f64,
    best: BestSnapshot,
    /// Strict improvements since the last checkpoint.
    n_inc: usize,
    eta_at_prev_ckpt: f64,
    fmax_at_prev_ckpt: f64,
}

struct StepOutcome {
    value: f64,
    move_dist: f64,
    proj_dist: f64,
}

impl EngineState {
    fn new(x0: Vec<f64>, value: f64, grad: Vec<f64>, eta: f64) -> Self {
        Self {
            best: BestSnapshot {
                point: x0.clone(),
                value,
                grad: grad.clone(),
                point_pre: x0.clone(),
                grad_pre: grad.clone(),
                dir_pre: grad.clone(),
            },
            x_prev: x0.clone(),
            grad_prev: grad.clone(),
            dir: grad.clone(),
            x: x0,
            grad,
            value,
            eta,
            n_inc: 0,
            eta_at_prev_ckpt: eta,
            fmax_at_prev_ckpt: value,
        }
    }

    /// Install the freshly evaluated iterate and update the running best.
    fn accept(&mut self, x_next: Vec<f64>, f_next: f64, g_next: Vec<f64>) {
        if f_next > self.best.value {
            self.best = BestSnapshot {
                point: x_next.clone(),
                value: f_next,
                grad: g_next.clone(),
                point_pre: self.x.clone(),
                grad_pre: self.grad.clone(),
                dir_pre: self.dir.clone(),
            };
        }
        self.x_prev = std::mem::replace(&mut self.x, x_next);
        self.grad_prev = std::mem::replace(&mut self.grad, g_next);
        self.value = f_next;
    }
}

fn acg_step(
    state: &mut EngineState,
    objective: &dyn Objective,
    region: &FeasibleRegion,
) -> StepOutcome {
    let proposal: Vec<f64> = state
        .x
        .iter()
        .zip(&state.dir)
        .map(|(xi, di)| xi + state.eta * sign(*di))
        .collect();
    let x_next = region.project(&proposal);
    let move_dist = dist(&x_next, &state.x);
    let proj_dist = dist(&x_next, &proposal);
    let f_next = objective.value(&x_next);
    let g_next = objective.gradient(&x_next);
    state.accept(x_next, f_next, g_next);
    StepOutcome {
        value: f_next,
        move_dist,
        proj_dist,
    }
}

fn apgd_step(
    state: &mut EngineState,
    objective: &dyn Objective,
    region: &FeasibleRegion,
    alpha: f64,
) -> StepOutcome {
    let proposal: Vec<f64> = state
        .x
        .iter()
        .zip(&state.grad)
        .map(|(xi, gi)| xi + state.eta * sign(*gi))
        .collect();
    let z = region.project(&proposal);
    let proj_dist = dist(&z, &proposal);
    // At alpha = 1 the momentum terms vanish identically, so take z itself
    // rather than re-rounding through the momentum arithmetic.
    let x_next = if alpha == 1.0 {
        z
    } else {
        let blended: Vec<f64> = (0..state.x.len())
            .map(|i| {
                state.x[i]
                    + alpha * (z[i] - state.x[i])
                    + (1.0 - alpha) * (state.x[i] - state.x_prev[i])
            })
            .collect();
        region.project(&blended)
    };
    let move_dist = dist(&x_next, &state.x);
    let f_next = objective.value(&x_next);
    let g_next = objective.gradient(&x_next);
    state.accept(x_next, f_next, g_next);
    StepOutcome {
        value: f_next,
        move_dist,
        proj_dist,
    }
}

/// Checkpoint inspection at iteration `w_cur` (the previous one was at
/// `w_prev`). Halves the step size and rewinds to the running best when
/// either condition fires:
///
/// 1. fewer than `rho * (w_cur - w_prev)` strict improvements since the
///    previous checkpoint, or
/// 2. both the step size and the running maximum are exactly unchanged
///    since the previous checkpoint.
///
/// Either way the checkpoint memory is refreshed with the pre-halving step
/// size and the current running maximum, and the improvement counter resets.
fn checkpoint_update(state: &mut EngineState, w_prev: usize, w_cur: usize, rho: f64) -> bool {
    let window = (w_cur - w_prev) as f64;
    let too_few_improvements = (state.n_inc as f64) < rho * window;
    let stalled =
        state.eta == state.eta_at_prev_ckpt && state.best.value == state.fmax_at_prev_ckpt;
    let eta_memory = state.eta;
    let fmax_memory = state.best.value;

    let halve = too_few_improvements || stalled;
    if halve {
        state.eta *= 0.5;
        state.x = state.best.point.clone();
        state.grad = state.best.grad.clone();
        state.value = state.best.value;
        state.x_prev = state.best.point_pre.clone();
        state.grad_prev = state.best.grad_pre.clone();
        state.dir = state.best.dir_pre.clone();
    }
    state.eta_at_prev_ckpt = eta_memory;
    state.fmax_at_prev_ckpt = fmax_memory;
    state.n_inc = 0;
    halve
}

/// Compute the conjugate coefficient from the current state and advance the
/// direction to `s = g + beta * s_prev`. Returns the coefficient.
fn update_conjugate_direction(state: &mut EngineState, config: &AttackConfig) -> f64 {
    let beta = if config.force_beta_zero {
        0.0
    } else {
        conjugate_coefficient(
            config.beta,
            &state.grad,
            &state.grad_prev,
            &state.dir,
            config.nonneg_beta,
        )
    };
    for (d, g) in state.dir.iter_mut().zip(&state.grad) {
        *d = g + beta * *d;
    }
    beta
}

/// Run one attack from `x0` (which must be feasible). Deterministic: the
/// engine itself draws no randomness.
pub fn run_attack(
    objective: &dyn Objective,
    region: &FeasibleRegion,
    x0: &[f64],
    config: &AttackConfig,
) -> Result<AttackTrace> {
    config.validate()?;
    if objective.dim() != region.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: objective.dim(),
            actual: region.dim(),
        });
    }
    if x0.len() != region.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: region.dim(),
            actual: x0.len(),
        });
    }
    if !region.contains(x0) {
        return Err(CoreError::InvalidParameter(
            "starting point lies outside the feasible region".into(),
        ));
    }
    let eta0 = config.resolved_eta0(region)?;
    let schedule = match &config.checkpoints {
        Some(ws) => ws.clone(),
        None => checkpoint_schedule(config.n_iter),
    };

    let f0 = objective.value(x0);
    let g0 = objective.gradient(x0);
    let mut state = EngineState::new(x0.to_vec(), f0, g0, eta0);
    let mut prev_family = config.method.family_at(state.eta);

    let mut rows = Vec::with_capacity(config.n_iter + 1);
    let mut points = Vec::with_capacity(config.n_iter + 1);
    rows.push(IterationRecord {
        iter: 0,
        loss: f0,
        f_max: f0,
        eta: eta0,
        beta: 0.0,
        ctc: objective.target_class(x0),
        move_dist: 0.0,
        proj_ratio: 0.0,
        halved: false,
    });
    points.push(x0.to_vec());

    let mut ckpt_idx = 0usize;
    let mut w_prev = 0usize;

    for k in 0..config.n_iter {
        // Family for this iteration; on a gradient-to-conjugate handover the
        // direction restarts from the current gradient.
        let family = config.method.family_at(state.eta);
        if family == Family::Cg && prev_family == Family::Gd {
            state.dir = state.grad.clone();
        }

        let outcome = match family {
            Family::Cg => acg_step(&mut state, objective, region),
            Family::Gd => apgd_step(&mut state, objective, region, config.alpha),
        };
        points.push(state.x.clone());
        let ctc = objective.target_class(points.last().unwrap());

        // Checkpoint inspection. The first checkpoint (iteration 0) only
        // seeds the memory; later ones may halve the step and rewind.
        let mut halved = false;
        if ckpt_idx < schedule.len() && schedule[ckpt_idx] == k {
            if k == 0 {
                state.eta_at_prev_ckpt = state.eta;
                state.fmax_at_prev_ckpt = state.best.value;
                state.n_inc = 0;
                w_prev = 0;
            } else {
                halved = checkpoint_update(&mut state, w_prev, k, config.rho);
                w_prev = k;
            }
            ckpt_idx += 1;
        }

        // This iteration's improvement is counted toward the window that the
        // NEXT checkpoint inspects, so the counter bumps after the
        // inspection. Both values compared are the recorded (pre-rewind)
        // ones, so the counter can be reproduced from the emitted rows.
        if outcome.value > rows.last().unwrap().loss {
            state.n_inc += 1;
        }

        let beta = if family == Family::Cg {
            update_conjugate_direction(&mut state, config)
        } else {
            0.0
        };
        prev_family = family;

        let proj_ratio = if outcome.move_dist == 0.0 {
            0.0
        } else {
            outcome.proj_dist / outcome.move_dist
        };
        rows.push(IterationRecord {
            iter: k + 1,
            loss: outcome.value,
            f_max: state.best.value,
            eta: state.eta,
            beta,
            ctc,
            move_dist: outcome.move_dist,
            proj_ratio,
            halved,
        });

        if config.early_stop && objective.reports_success() && state.best.value >= 0.0 {
            break;
        }
    }

    Ok(AttackTrace {
        rows,
        points,
        best_point: state.best.point,
        best_value: state.best.value,
    })
}

/// Run `restarts` independent attacks: the first from `x0` (conventionally
/// the unperturbed input), the rest from uniformly sampled feasible points
/// with seeds `base_seed + r`. Runs execute in parallel when the `parallel`
/// feature is on; the returned order is always restart order, so results are
/// thread-count independent.
pub fn run_restarts(
    objective: &dyn Objective,
    region: &FeasibleRegion,
    x0: &[f64],
    config: &AttackConfig,
    restarts: usize,
    base_seed: u64,
) -> Result<Vec<AttackTrace>> {
    if restarts == 0 {
        return Err(CoreError::InvalidParameter("restarts must be >= 1".into()));
    }
    config.validate()?;
    let starts: Vec<Vec<f64>> = (1..=restarts)
        .map(|r| {
            if r == 1 {
                x0.to_vec()
            } else {
                region.sample_uniform(base_seed.wrapping_add(r as u64))
            }
        })
        .collect();
    crate::parallel::par_map(&starts, |x0| run_attack(objective, region, x0, config))
        .into_iter()
        .collect()
}
