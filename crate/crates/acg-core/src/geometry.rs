//! Feasible region of an l-infinity budget attack: the eps-ball around the
//! original point intersected with the unit box.
//!
//! Bounds are `u = min(x_orig + eps, 1)` and `l = max(x_orig - eps, 0)`;
//! projection is the coordinate-wise clamp, which is exact for this set.

use crate::error::{CoreError, Result};
use crate::vecmath::dist;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Box-shaped feasible region with per-coordinate bounds `l <= u`.
///
/// Immutable after construction; all operations are pure, so a region can be
/// shared freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleRegion {
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Radius the region was built from, when it came from a budget around a
    /// point; regions built from raw bounds have none.
    eps: Option<f64>,
}

impl FeasibleRegion {
    /// Region for an attack on `x_orig` (inside the unit box) with radius
    /// `eps > 0` in every coordinate.
    pub fn new(x_orig: &[f64], eps: f64) -> Result<Self> {
        if !eps.is_finite() || eps <= 0.0 {
            return Err(CoreError::InvalidParameter(format!(
                "eps must be positive and finite, got {eps}"
            )));
        }
        if x_orig.is_empty() {
            return Err(CoreError::InvalidParameter(
                "region needs at least one dimension".into(),
            ));
        }
        for (i, &v) in x_orig.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(CoreError::InvalidParameter(format!(
                    "x_orig[{i}] = {v} outside the unit box"
                )));
            }
        }
        let upper: Vec<f64> = x_orig.iter().map(|&v| (v + eps).min(1.0)).collect();
        let lower: Vec<f64> = x_orig.iter().map(|&v| (v - eps).max(0.0)).collect();
        Ok(Self {
            lower,
            upper,
            eps: Some(eps),
        })
    }

    /// Region from explicit bounds; mainly useful in tests and benchmarks.
    pub fn from_bounds(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(CoreError::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(CoreError::InvalidParameter(
                "region needs at least one dimension".into(),
            ));
        }
        for i in 0..lower.len() {
            if !lower[i].is_finite() || !upper[i].is_finite() || lower[i] > upper[i] {
                return Err(CoreError::InvalidParameter(format!(
                    "bounds[{i}] invalid: lower {} upper {}",
                    lower[i], upper[i]
                )));
            }
        }
        Ok(Self {
            lower,
            upper,
            eps: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Budget radius used to build this region, if it was built from one.
    pub fn eps(&self) -> Option<f64> {
        self.eps
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Coordinate-wise clamp onto `[l, u]`. Idempotent; feasible points pass
    /// through bit-unchanged.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim(), "project: dimension mismatch");
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&lo, &hi))| v.max(lo).min(hi))
            .collect()
    }

    /// True when `l <= x <= u` holds coordinate-wise.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| lo <= v && v <= hi)
    }

    /// Center of the region, `(u + l) / 2`; the deterministic first-restart
    /// start point.
    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| 0.5 * (lo + hi))
            .collect()
    }

    /// Diameter `M = ||u - l||_2`, the integration bound used by the
    /// diversity index over attack traces.
    pub fn diameter(&self) -> f64 {
        dist(&self.upper, &self.lower)
    }

    /// Coordinate-wise uniform sample on `[l, u]`, reproducible for a fixed
    /// seed (ChaCha8 stream).
    pub fn sample_uniform(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| {
                if lo == hi {
                    lo
                } else {
                    rng.random_range(lo..=hi)
                }
            })
            .collect()
    }
}
