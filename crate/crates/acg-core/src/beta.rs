//! Conjugate-coefficient rules for the ascent direction update.
//!
//! The engine maintains a search direction `s_k = g_k + beta * s_{k-1}` where
//! `g_k` is the current gradient of the objective being maximized. All rules
//! are expressed with the gradient-difference vector oriented for ascent,
//! `y = g_{k-1} - g_k`, and share three guard conventions:
//!
//! * if `y` is exactly the zero vector the coefficient is 0 (the direction
//!   reduces to plain gradient ascent rather than dividing 0/0);
//! * any exactly-zero denominator yields 0;
//! * with the non-negativity switch the result is `max(beta, 0)`.

use crate::vecmath::{dot, is_zero};
use std::fmt;

/// Which conjugate-coefficient formula to apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaRule {
    /// `<g,g> / <g_prev,g_prev>`
    FletcherReeves,
    /// `<g,y> / <g_prev,g_prev>`
    PolakRibiere,
    /// `-<g,y> / <s,y>`
    HestenesStiefel,
    /// `<g,g> / <s,y>`
    DaiYuan,
    /// `<y - 2s<y,y>/<s,y>, g> / <s,y>`
    HagerZhang,
    /// `-<y - t*s, g> / <s,y>` with a fixed weight `t >= 0`; `t = 0`
    /// coincides with Hestenes-Stiefel.
    DaiLiao { t: f64 },
    /// `-<g,y> / <s,g_prev>`
    LiuStorey,
}

impl fmt::Display for BetaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaRule::FletcherReeves => write!(f, "fr"),
            BetaRule::PolakRibiere => write!(f, "pr"),
            BetaRule::HestenesStiefel => write!(f, "hs"),
            BetaRule::DaiYuan => write!(f, "dy"),
            BetaRule::HagerZhang => write!(f, "hz"),
            BetaRule::DaiLiao { t } => write!(f, "dl(t={t})"),
            BetaRule::LiuStorey => write!(f, "ls"),
        }
    }
}

/// Evaluate the conjugate coefficient for the ascent update.
///
/// * `grad` - current gradient `g_k` (at the point the next direction leaves
///   from, i.e. after any restore-to-best bookkeeping),
/// * `grad_prev` - previous gradient `g_{k-1}`,
/// * `s_prev` - previous search direction,
/// * `nonneg` - clip the result at zero.
pub fn conjugate_coefficient(
    rule: BetaRule,
    grad: &[f64],
    grad_prev: &[f64],
    s_prev: &[f64],
    nonneg: bool,
) -> f64 {
    assert_eq!(grad.len(), grad_prev.len(), "gradient length mismatch");
    assert_eq!(grad.len(), s_prev.len(), "direction length mismatch");
    if let BetaRule::DaiLiao { t } = rule {
        assert!(
            t >= 0.0 && t.is_finite(),
            "Dai-Liao weight must be finite and >= 0"
        );
    }

    let y: Vec<f64> = grad_prev.iter().zip(grad).map(|(p, c)| p - c).collect();
    if is_zero(&y) {
        return 0.0;
    }

    let beta = match rule {
        BetaRule::FletcherReeves => {
            let denom = dot(grad_prev, grad_prev);
            if denom == 0.0 {
                return 0.0;
            }
            dot(grad, grad) / denom
        }
        BetaRule::PolakRibiere => {
            let denom = dot(grad_prev, grad_prev);
            if denom == 0.0 {
                return 0.0;
            }
            dot(grad, &y) / denom
        }
        BetaRule::HestenesStiefel => {
            let denom = dot(s_prev, &y);
            if denom == 0.0 {
                return 0.0;
            }
            -dot(grad, &y) / denom
        }
        BetaRule::DaiYuan => {
            let denom = dot(s_prev, &y);
            if denom == 0.0 {
                return 0.0;
            }
            dot(grad, grad) / denom
        }
        BetaRule::HagerZhang => {
            // The same <s,y> scales both the inner correction and the outer
            // quotient, so one zero check covers both.
            let denom = dot(s_prev, &y);
            if denom == 0.0 {
                return 0.0;
            }
            let scale = 2.0 * dot(&y, &y) / denom;
            let corrected: Vec<f64> = y
                .iter()
                .zip(s_prev)
                .map(|(yi, si)| yi - scale * si)
                .collect();
            dot(&corrected, grad) / denom
        }
        BetaRule::DaiLiao { t } => {
            let denom = dot(s_prev, &y);
            if denom == 0.0 {
                return 0.0;
            }
            let shifted: Vec<f64> = y.iter().zip(s_prev).map(|(yi, si)| yi - t * si).collect();
            -dot(&shifted, grad) / denom
        }
        BetaRule::LiuStorey => {
            let denom = dot(s_prev, grad_prev);
            if denom == 0.0 {
                return 0.0;
            }
            -dot(grad, &y) / denom
        }
    };

    if nonneg {
        beta.max(0.0)
    } else {
        beta
    }
}

/// All rules with their default parameters, in a fixed order (useful for
/// sweeps and exhaustive tests).
pub const DEFAULT_RULES: [BetaRule; 7] = [
    BetaRule::FletcherReeves,
    BetaRule::PolakRibiere,
    BetaRule::HestenesStiefel,
    BetaRule::DaiYuan,
    BetaRule::HagerZhang,
    BetaRule::DaiLiao { t: 0.1 },
    BetaRule::LiuStorey,
];
