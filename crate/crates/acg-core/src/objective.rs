//! Differentiable scalar objectives for the maximization engine.
//!
//! Three concrete objectives are shipped:
//! - the Carlini-Wagner margin loss through a classifier (the attack target),
//! - strictly convex quadratics (conjugate gradient checks),
//! - a 2-D multimodal surface (diversification playground).

use crate::error::{CoreError, Result};
use crate::mlp::MlpClassifier;
use crate::vecmath::{dot, matvec};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A scalar function of a point together with its analytic gradient.
///
/// The engine maximizes objectives directly; there is no hidden sign flip.
/// Implementations must be pure so evaluations can run concurrently.
pub trait Objective: Sync {
    /// Input dimension.
    fn dim(&self) -> usize;

    /// Function value at `x`.
    fn value(&self, x: &[f64]) -> f64;

    /// Analytic gradient at `x`.
    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// For classifier objectives: the class currently being pushed above the
    /// true class at `x`. `None` for plain functions.
    fn target_class(&self, x: &[f64]) -> Option<usize> {
        let _ = x;
        None
    }

    /// Whether values encode attack success at `value >= 0` (true only for
    /// classifier margin objectives).
    fn reports_success(&self) -> bool {
        false
    }
}

/// Margin loss `-logits[c] + max_{i != c} logits[i]`.
///
/// Nonnegative exactly when some other class outscores the true class, i.e.
/// when the input is misclassified.
pub fn margin_loss(logits: &[f64], true_class: usize) -> Result<f64> {
    check_logits(logits, true_class)?;
    let rival = runner_up_class(logits, true_class)?;
    Ok(-logits[true_class] + logits[rival])
}

/// The class attaining `max_{i != c} logits[i]`, ties broken toward the
/// lowest index. This is the class the margin loss currently pushes toward.
pub fn runner_up_class(logits: &[f64], true_class: usize) -> Result<usize> {
    check_logits(logits, true_class)?;
    let mut best = usize::MAX;
    for (i, &v) in logits.iter().enumerate() {
        if i == true_class {
            continue;
        }
        if best == usize::MAX || v > logits[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Gradient of the margin loss with respect to the logits: +1 at the runner-up
/// class, -1 at the true class, 0 elsewhere.
pub fn margin_grad_logits(logits: &[f64], true_class: usize) -> Result<Vec<f64>> {
    let rival = runner_up_class(logits, true_class)?;
    let mut g = vec![0.0; logits.len()];
    g[rival] = 1.0;
    g[true_class] = -1.0;
    Ok(g)
}

fn check_logits(logits: &[f64], true_class: usize) -> Result<()> {
    if logits.len() < 2 {
        return Err(CoreError::InvalidParameter(format!(
            "margin loss needs at least 2 logits, got {}",
            logits.len()
        )));
    }
    if true_class >= logits.len() {
        return Err(CoreError::InvalidParameter(format!(
            "class index {true_class} out of range for {} logits",
            logits.len()
        )));
    }
    Ok(())
}

/// Margin loss through a classifier: the standard white-box attack objective.
pub struct MarginObjective<'a> {
    model: &'a MlpClassifier,
    true_class: usize,
}

impl<'a> MarginObjective<'a> {
    pub fn new(model: &'a MlpClassifier, true_class: usize) -> Result<Self> {
        if model.num_classes < 2 {
            return Err(CoreError::InvalidParameter(
                "classifier must have at least 2 classes".into(),
            ));
        }
        if true_class >= model.num_classes {
            return Err(CoreError::InvalidParameter(format!(
                "true class {true_class} out of range for {} classes",
                model.num_classes
            )));
        }
        Ok(Self { model, true_class })
    }

    pub fn true_class(&self) -> usize {
        self.true_class
    }
}

impl Objective for MarginObjective<'_> {
    fn dim(&self) -> usize {
        self.model.input_dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let logits = self.model.logits(x);
        margin_loss(&logits, self.true_class).expect("validated at construction")
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let logits = self.model.logits(x);
        let dlogits =
            margin_grad_logits(&logits, self.true_class).expect("validated at construction");
        self.model.input_gradient(x, &dlogits)
    }

    fn target_class(&self, x: &[f64]) -> Option<usize> {
        let logits = self.model.logits(x);
        Some(runner_up_class(&logits, self.true_class).expect("validated at construction"))
    }

    fn reports_success(&self) -> bool {
        true
    }
}

/// Strictly convex quadratic `f(x) = x^T A x + b^T x` with A symmetric
/// positive definite (row-major storage).
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Quadratic {
    /// Validates symmetry and positive definiteness (Cholesky succeeds).
    pub fn new(n: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::InvalidParameter(
                "quadratic needs dimension >= 1".into(),
            ));
        }
        if a.len() != n * n {
            return Err(CoreError::DimensionMismatch {
                expected: n * n,
                actual: a.len(),
            });
        }
        if b.len() != n {
            return Err(CoreError::DimensionMismatch {
                expected: n,
                actual: b.len(),
            });
        }
        for i in 0..n {
            for j in 0..i {
                if a[i * n + j] != a[j * n + i] {
                    return Err(CoreError::InvalidParameter(format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        if !crate::vecmath::cholesky_is_spd(&a, n) {
            return Err(CoreError::InvalidParameter(
                "matrix is not positive definite".into(),
            ));
        }
        Ok(Self { n, a, b })
    }

    /// Random SPD instance `A = G^T G / n + 0.5 I` with G entries uniform on
    /// [-1, 1], plus a uniform b. Dividing the Gram term by `n` keeps the
    /// spectrum O(1) at every size and the 0.5 shift bounds it away from
    /// zero, so the condition number stays small (roughly 4) across the
    /// whole size sweep and finite-precision rounding cannot mask the
    /// finite-termination property of conjugate methods.
    pub fn random_spd(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let scale = 1.0 / n as f64;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut sum = 0.0;
                for k in 0..n {
                    sum += g[k * n + i] * g[k * n + j];
                }
                a[i * n + j] = scale * sum;
            }
            a[i * n + i] += 0.5;
        }
        // Exact symmetry despite float accumulation order.
        for i in 0..n {
            for j in 0..i {
                a[i * n + j] = a[j * n + i];
            }
        }
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        Self::new(n, a, b).expect("construction is SPD by design")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn linear(&self) -> &[f64] {
        &self.b
    }

    /// Product `A v`.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        matvec(&self.a, v, self.n)
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        let ax = self.matvec(x);
        dot(x, &ax) + dot(&self.b, x)
    }

    /// `grad f = 2 A x + b` for symmetric A.
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.matvec(x);
        ax.iter()
            .zip(&self.b)
            .map(|(&axi, &bi)| 2.0 * axi + bi)
            .collect()
    }
}

/// 2-D multimodal surface
/// `f(x, y) = -10 exp(-0.2 sqrt((x^4 + y^2)/2)) + exp((cos 2 pi x + cos 2 pi y)/2)`.
///
/// A lattice of local maxima around a deep central pit; useful for watching
/// how a search balances spreading out against settling in. The gradient has
/// a cusp at the origin, where it is defined as 0 (stationary by symmetry).
#[derive(Debug, Clone, Copy, Default)]
pub struct MultimodalSurface;

impl Objective for MultimodalSurface {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, p: &[f64]) -> f64 {
        assert_eq!(p.len(), 2, "multimodal surface is 2-D");
        let (x, y) = (p[0], p[1]);
        let r = (0.5 * (x.powi(4) + y * y)).sqrt();
        -10.0 * (-0.2 * r).exp()
            + (0.5
                * ((2.0 * std::f64::consts::PI * x).cos() + (2.0 * std::f64::consts::PI * y).cos()))
            .exp()
    }

    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        assert_eq!(p.len(), 2, "multimodal surface is 2-D");
        let (x, y) = (p[0], p[1]);
        let two_pi = 2.0 * std::f64::consts::PI;
        let e = (0.5 * ((two_pi * x).cos() + (two_pi * y).cos())).exp();
        let r = (0.5 * (x.powi(4) + y * y)).sqrt();
        if r == 0.0 {
            // Cusp of the exponential term; cosine term is also stationary here.
            return vec![0.0, 0.0];
        }
        let decay = (-0.2 * r).exp();
        let gx = 2.0 * x.powi(3) * decay / r - std::f64::consts::PI * (two_pi * x).sin() * e;
        let gy = y * decay / r - std::f64::consts::PI * (two_pi * y).sin() * e;
        vec![gx, gy]
    }
}
