//! Classical conjugate gradient on strictly convex quadratics.
//!
//! This is the unconstrained reference algorithm the box-constrained attack
//! generalizes: exact line search plus conjugate direction updates minimize
//! `f(x) = x'Ax + b'x` (A symmetric positive definite) in at most `dim`
//! iterations up to floating-point rounding.

use crate::objective::Quadratic;
use crate::vecmath::{dot, norm};

/// Result of a conjugate-gradient minimization run.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    /// Final iterate.
    pub x: Vec<f64>,
    /// Number of steps actually taken.
    pub iterations: usize,
    /// `||2Ax + b||` at the final iterate.
    pub grad_norm: f64,
    /// Whether the gradient-norm tolerance was met.
    pub converged: bool,
    /// Objective values at `x_0, x_1, ..., x_final`.
    pub values: Vec<f64>,
}

/// Minimize `x'Ax + b'x` from `x0` by conjugate gradient with exact line
/// search. Per iteration, with gradient `g = 2Ax + b` and direction `s`
/// (initially `-g`):
///
/// * step length `eta = -<g,s> / (2 s'As)` (the exact minimizer along `s`),
/// * direction update `s <- -g_new + beta s` with `beta = <As, g_new> / <As, s>`,
///   which enforces A-conjugacy `<s_new, A s> = 0`.
///
/// Stops as soon as `||g|| <= tol` or after `max_iters` steps.
pub fn cg_quadratic_minimize(q: &Quadratic, x0: &[f64], max_iters: usize, tol: f64) -> CgOutcome {
    assert_eq!(x0.len(), q.dim(), "starting point dimension mismatch");
    assert!(tol >= 0.0, "tolerance must be non-negative");

    let grad_at = |x: &[f64]| -> Vec<f64> {
        q.matvec(x)
            .iter()
            .zip(q.linear())
            .map(|(ax, b)| 2.0 * ax + b)
            .collect()
    };

    let mut x = x0.to_vec();
    let mut g = grad_at(&x);
    let mut s: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut values = vec![quad_value(q, &x)];
    let mut iterations = 0;

    for _ in 0..max_iters {
        if norm(&g) <= tol {
            break;
        }
        let a_s = q.matvec(&s);
        let curvature = 2.0 * dot(&s, &a_s);
        if curvature == 0.0 {
            // Only possible when s vanishes; nothing to move along.
            break;
        }
        let eta = -dot(&g, &s) / curvature;
        for (xi, si) in x.iter_mut().zip(&s) {
            *xi += eta * si;
        }
        g = grad_at(&x);
        let beta = dot(&a_s, &g) / dot(&a_s, &s);
        for (si, gi) in s.iter_mut().zip(&g) {
            *si = -gi + beta * *si;
        }
        iterations += 1;
        values.push(quad_value(q, &x));
    }

    let grad_norm = norm(&g);
    CgOutcome {
        x,
        iterations,
        grad_norm,
        converged: grad_norm <= tol,
        values,
    }
}

fn quad_value(q: &Quadratic, x: &[f64]) -> f64 {
    dot(x, &q.matvec(x)) + dot(q.linear(), x)
}
