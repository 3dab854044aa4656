//! End-to-end engine checks built on hand-traceable scenarios: scripted
//! objective values drive the step-size checkpoint logic through its full
//! truth table, a linear classifier pins the first step to an exact vertex,
//! and a dyadic one-dimensional run reproduces the momentum arithmetic
//! bit for bit.

use acg_core::{
    run_attack, Activation, AttackConfig, DenseLayer, FeasibleRegion, MarginObjective, Method,
    MlpClassifier, MultimodalSurface, Objective,
};
use std::sync::atomic::{AtomicUsize, Ordering};

/// Objective whose values come from a fixed script, one entry per
/// evaluation, independent of the query point. The gradient is a constant,
/// so iterates march in a straight line and the value sequence seen by the
/// engine is fully controlled by the test.
struct Scripted {
    values: Vec<f64>,
    grad: Vec<f64>,
    next: AtomicUsize,
}

impl Scripted {
    fn new(values: &[f64], grad: &[f64]) -> Self {
        Self {
            values: values.to_vec(),
            grad: grad.to_vec(),
            next: AtomicUsize::new(0),
        }
    }
}

impl Objective for Scripted {
    fn dim(&self) -> usize {
        self.grad.len()
    }
    fn value(&self, _x: &[f64]) -> f64 {
        let i = self.next.fetch_add(1, Ordering::SeqCst);
        self.values[i.min(self.values.len() - 1)]
    }
    fn gradient(&self, _x: &[f64]) -> Vec<f64> {
        self.grad.clone()
    }
}

struct LinearAscent {
    w: Vec<f64>,
}

impl Objective for LinearAscent {
    fn dim(&self) -> usize {
        self.w.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.w.iter().zip(x).map(|(w, x)| w * x).sum()
    }
    fn gradient(&self, _x: &[f64]) -> Vec<f64> {
        self.w.clone()
    }
}

/// Drive one scripted run: unit gradient in 1-D, step size 1, checkpoints
/// at iterations 0 and 4 with rho = 0.5, six iterations total. The script
/// has 7 entries (start plus one per iteration). Returns the trace.
fn scripted_run(script: &[f64]) -> acg_core::AttackTrace {
    assert_eq!(script.len(), 7);
    let objective = Scripted::new(script, &[1.0]);
    let region = FeasibleRegion::from_bounds(vec![-100.0], vec![100.0]).unwrap();
    let config = AttackConfig {
        n_iter: 6,
        eta0: Some(1.0),
        rho: 0.5,
        checkpoints: Some(vec![0, 4]),
        ..AttackConfig::default()
    };
    run_attack(&objective, &region, &[0.0], &config).unwrap()
}

/// The checkpoint at iteration 4 inspects a window of 4 improvement
/// comparisons (iterations 0-3) with threshold rho * 4 = 2, and compares
/// the step size and running maximum against their values remembered at
/// iteration 0 (which already includes iteration 0's own evaluation).
///
/// Halving condition truth table:
/// * too few improvements (I): fewer than 2 of the 4 comparisons improved;
/// * stagnation (II): eta and the running maximum both exactly unchanged.
#[test]
fn checkpoint_truth_table() {
    struct Case {
        name: &'static str,
        // f(x_0), f(x_1), ..., f(x_6); x_k = k until a halving rewinds.
        script: [f64; 7],
        halves: bool,
        // Point evaluated by iteration 5, after any rewind at iteration 4.
        x6: f64,
    }
    let cases = [
        Case {
            // 4 improvements, running max keeps growing.
            name: "neither condition",
            script: [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 0.0],
            halves: false,
            x6: 6.0,
        },
        Case {
            // 1 improvement < 2, but iteration 4 spikes the running max
            // (12 at x_5 = 5), so only condition I fires. The rewind target
            // is that fresh best.
            name: "condition I only",
            script: [0.0, 1.0, 0.5, 0.4, 0.3, 12.0, 0.0],
            halves: true,
            x6: 5.5,
        },
        Case {
            // 2 improvements (0->1 and 2->3 in the comparison sense), so I
            // does not fire, but the running max has been 11 since x_1 and
            // eta never changed: condition II fires and rewinds to x_1 = 1.
            name: "condition II only",
            script: [10.0, 11.0, 1.0, 2.0, 1.5, 1.6, 0.0],
            halves: true,
            x6: 1.5,
        },
        Case {
            // 1 improvement and a stagnant running max: both conditions.
            name: "both conditions",
            script: [10.0, 11.0, 1.0, 0.5, 0.25, 0.1, 0.0],
            halves: true,
            x6: 1.5,
        },
    ];

    for case in &cases {
        let trace = scripted_run(&case.script);
        assert_eq!(trace.rows.len(), 7, "{}", case.name);
        // Constant unit gradient, eta = 1: iterates walk 0, 1, ..., 5.
        for k in 0..=5 {
            assert_eq!(trace.points[k], vec![k as f64], "{}", case.name);
        }
        // Only the iteration-4 checkpoint may halve (iteration 0 just seeds
        // the memory), and it shows up in row 5.
        for (i, row) in trace.rows.iter().enumerate() {
            assert_eq!(row.halved, case.halves && i == 5, "{} row {i}", case.name);
        }
        let expected_eta = if case.halves { 0.5 } else { 1.0 };
        assert_eq!(trace.rows[5].eta, expected_eta, "{}", case.name);
        assert_eq!(trace.rows[4].eta, 1.0, "{}", case.name);
        // The rewind (or its absence) is visible in where iteration 5 lands.
        assert_eq!(trace.points[6], vec![case.x6], "{}", case.name);
        // Recorded losses are exactly the script, rewind or not.
        for (k, row) in trace.rows.iter().enumerate() {
            assert_eq!(row.loss, case.script[k], "{} row {k}", case.name);
        }
    }
}

#[test]
fn linear_classifier_first_step_hits_the_budget_vertex() {
    // Margin gradient of a linear two-class model is the constant
    // w_1 - w_0; the first step moves eta0 = 2*eps in its sign direction
    // and the projection clips that to exactly the eps-vertex.
    let model = MlpClassifier {
        input_dim: 2,
        num_classes: 2,
        layers: vec![DenseLayer {
            rows: 2,
            cols: 2,
            weights: vec![0.0, 0.0, 1.0, -1.0],
            bias: vec![0.0, 0.0],
            activation: Activation::Identity,
        }],
    };
    let objective = MarginObjective::new(&model, 0).unwrap();
    let config = AttackConfig {
        n_iter: 5,
        ..AttackConfig::default()
    };

    // Interior case: the sign direction is (+1, -1), landing on
    // (x + eps, y - eps) exactly.
    let region = FeasibleRegion::new(&[0.5, 0.4], 0.2).unwrap();
    let trace = run_attack(&objective, &region, &[0.5, 0.4], &config).unwrap();
    assert_eq!(trace.points[1], vec![0.7, 0.2]);
    assert_eq!(trace.rows[1].loss, 0.7 - 0.2);

    // Clipped case: the budget sticks out of the unit box, so the vertex
    // is the box corner.
    let region = FeasibleRegion::new(&[0.9, 0.1], 0.3).unwrap();
    let trace = run_attack(&objective, &region, &[0.9, 0.1], &config).unwrap();
    assert_eq!(trace.points[1], vec![1.0, 0.0]);

    // Once on the vertex the constant gradient keeps proposing the same
    // corner: nothing moves afterwards.
    for k in 2..trace.points.len() {
        assert_eq!(trace.points[k], vec![1.0, 0.0]);
        assert_eq!(trace.rows[k].move_dist, 0.0);
        assert_eq!(trace.rows[k].proj_ratio, 0.0);
    }
}

#[test]
fn momentum_arithmetic_matches_hand_trace_exactly() {
    // 1-D ascent on f(x) = x with dyadic step sizes: every intermediate
    // value is exactly representable, so the whole trajectory must match
    // the hand computation bit for bit.
    //
    //   z  = x + 0.25 (never clipped here)
    //   x' = x + 0.75*(z - x) + 0.25*(x - x_prev)
    //
    //   x0 = 0.25
    //   x1 = 0.25 + 0.1875 + 0          = 0.4375
    //   x2 = 0.4375 + 0.1875 + 0.046875 = 0.671875
    //   x3 = 0.671875 + 0.1875 + 0.25*0.234375 = 0.91796875
    let objective = LinearAscent { w: vec![1.0] };
    let region = FeasibleRegion::from_bounds(vec![0.0], vec![1.0]).unwrap();
    let config = AttackConfig {
        method: Method::Apgd,
        n_iter: 3,
        eta0: Some(0.25),
        ..AttackConfig::default()
    };
    let trace = run_attack(&objective, &region, &[0.25], &config).unwrap();
    let expected = [0.25, 0.4375, 0.671875, 0.91796875];
    for (k, &x) in expected.iter().enumerate() {
        assert_eq!(trace.points[k], vec![x], "iterate {k}");
        assert_eq!(trace.rows[k].loss, x, "loss {k}");
    }
    assert_eq!(trace.best_value, 0.91796875);
    // No halving interferes in 3 iterations of steady improvement.
    assert!(trace.rows.iter().all(|r| !r.halved));
}

#[test]
fn hybrids_that_never_switch_match_the_pure_gradient_method() {
    let region = FeasibleRegion::new(&[0.4, 0.6], 0.25).unwrap();
    let objective = MultimodalSurface;
    let apgd = AttackConfig {
        method: Method::Apgd,
        ..AttackConfig::default()
    };
    let reference = run_attack(&objective, &region, &region.center(), &apgd).unwrap();

    // Gd-family from the start and never below the switch threshold.
    let gd_forever = AttackConfig {
        method: Method::HybridCgToGd { switch_eta: 0.5 },
        ..AttackConfig::default()
    };
    let a = run_attack(&objective, &region, &region.center(), &gd_forever).unwrap();
    assert_eq!(a.rows, reference.rows);
    assert_eq!(a.points, reference.points);

    // Switch threshold unreachably low: the handover to CG never happens.
    let never_switch = AttackConfig {
        method: Method::HybridGdToCg { switch_eta: 1e-300 },
        ..AttackConfig::default()
    };
    let b = run_attack(&objective, &region, &region.center(), &never_switch).unwrap();
    assert_eq!(b.rows, reference.rows);
    assert_eq!(b.points, reference.points);
}

/// Frozen trajectories on the multimodal surface. The constants were
/// produced by this exact configuration and pin down the full numeric
/// behavior of the engine (direction updates, halving cadence, best-point
/// bookkeeping); any change to the iteration arithmetic shows up here.
#[test]
fn frozen_multimodal_regression() {
    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-10 * b.abs().max(1.0)
    }
    let region = FeasibleRegion::new(&[0.45, 0.55], 0.3).unwrap();
    let objective = MultimodalSurface;

    let acg = AttackConfig {
        n_iter: 40,
        ..AttackConfig::default()
    };
    let t = run_attack(&objective, &region, &region.center(), &acg).unwrap();
    assert!(close(t.best_value, -7.315971865640098), "{}", t.best_value);
    assert!(close(t.best_point[0], 0.75) && close(t.best_point[1], 0.8500000000000001));
    assert!(close(t.rows[1].loss, -7.315971865640098));
    assert!(close(t.rows[1].beta, -8.49163732685953));
    assert!(close(t.rows[5].loss, -8.166290385081115));
    assert!(close(t.rows[5].beta, 2.26045345359197e16));
    assert!(close(t.rows[20].loss, -8.325530965781663));
    assert!(close(t.rows[20].beta, 0.056852893590605));
    assert!(close(t.rows[40].loss, -7.357772864095827));
    assert!(close(t.rows[40].beta, -0.2560427074023132));
    assert_eq!(t.rows[20].eta, 0.15);
    assert_eq!(t.rows[40].eta, 0.009375);
    let halved: Vec<usize> = t
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.halved)
        .map(|(i, _)| i)
        .collect();
    assert_eq!(halved, vec![10, 18, 24, 33, 36, 39]);

    let apgd = AttackConfig {
        method: Method::Apgd,
        n_iter: 40,
        ..AttackConfig::default()
    };
    let t = run_attack(&objective, &region, &region.center(), &apgd).unwrap();
    assert!(close(t.best_value, -7.315971865640098));
    assert!(close(t.rows[1].loss, -7.944350210688532));
    assert!(t.rows.iter().all(|r| r.beta == 0.0));
    assert_eq!(t.rows[40].eta, 0.0046875);
    let halved: Vec<usize> = t
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.halved)
        .map(|(i, _)| i)
        .collect();
    assert_eq!(halved, vec![10, 18, 24, 29, 33, 36, 39]);
}
