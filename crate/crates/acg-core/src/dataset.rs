//! Toy 2-D datasets for training the desk-scale classifier.
//!
//! Both generators emit points inside the unit square so that the attack
//! geometry (box-intersected neighborhoods of data points) applies directly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Labeled point cloud; `points[i]` has label `labels[i] < num_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Two interleaved half-circles with Gaussian coordinate noise, mapped into
/// the unit square. The outer arc `(cos t, sin t)` is class 0 and the inner
/// arc `(1 - cos t, 0.5 - sin t)` is class 1, with `t` evenly spaced on
/// `[0, pi]`. Class 0 gets the extra sample when `n` is odd.
pub fn two_moons(n: usize, noise: f64, seed: u64) -> Dataset {
    assert!(n >= 1, "two_moons: need at least one sample");
    assert!(
        noise >= 0.0 && noise.is_finite(),
        "two_moons: noise must be a finite non-negative number"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = Normal::new(0.0, noise).expect("valid std dev");

    let n_outer = n - n / 2;
    let n_inner = n / 2;
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);

    let arc_param = |i: usize, count: usize| {
        if count <= 1 {
            0.0
        } else {
            std::f64::consts::PI * i as f64 / (count - 1) as f64
        }
    };
    // Raw moons live in [-1, 2] x [-0.5, 1]; this affine map sends that
    // bounding box onto the unit square.
    let to_unit = |x: f64, y: f64| vec![clamp01((x + 1.0) / 3.0), clamp01((y + 0.5) / 1.5)];

    for i in 0..n_outer {
        let t = arc_param(i, n_outer);
        let x = t.cos() + gauss.sample(&mut rng);
        let y = t.sin() + gauss.sample(&mut rng);
        points.push(to_unit(x, y));
        labels.push(0);
    }
    for i in 0..n_inner {
        let t = arc_param(i, n_inner);
        let x = 1.0 - t.cos() + gauss.sample(&mut rng);
        let y = 0.5 - t.sin() + gauss.sample(&mut rng);
        points.push(to_unit(x, y));
        labels.push(1);
    }

    Dataset {
        points,
        labels,
        num_classes: 2,
    }
}

/// Isotropic Gaussian blobs whose centers sit on a radius-0.3 circle around
/// the middle of the unit square. Labels are assigned round-robin, so class
/// counts differ by at most one. Coordinates are clamped to `[0, 1]`.
pub fn gaussian_blobs(n: usize, num_classes: usize, spread: f64, seed: u64) -> Dataset {
    assert!(n >= 1, "gaussian_blobs: need at least one sample");
    assert!(num_classes >= 1, "gaussian_blobs: need at least one class");
    assert!(
        spread >= 0.0 && spread.is_finite(),
        "gaussian_blobs: spread must be a finite non-negative number"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = Normal::new(0.0, spread).expect("valid std dev");

    let centers: Vec<[f64; 2]> = (0..num_classes)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / num_classes as f64;
            [0.5 + 0.3 * angle.cos(), 0.5 + 0.3 * angle.sin()]
        })
        .collect();

    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = i % num_classes;
        let c = centers[label];
        points.push(vec![
            clamp01(c[0] + gauss.sample(&mut rng)),
            clamp01(c[1] + gauss.sample(&mut rng)),
        ]);
        labels.push(label);
    }

    Dataset {
        points,
        labels,
        num_classes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moons_counts_and_labels() {
        let d = two_moons(101, 0.05, 0);
        assert_eq!(d.len(), 101);
        assert_eq!(d.num_classes, 2);
        assert_eq!(d.labels.iter().filter(|&&l| l == 0).count(), 51);
        assert_eq!(d.labels.iter().filter(|&&l| l == 1).count(), 50);
        assert!(d.points.iter().all(|p| p.len() == 2));
    }

    #[test]
    fn moons_stay_in_unit_square() {
        let d = two_moons(500, 0.3, 7);
        for p in &d.points {
            assert!((0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1]));
        }
    }

    #[test]
    fn noiseless_moons_lie_on_mapped_arcs() {
        let d = two_moons(4, 0.0, 0);
        // First outer point: t = 0 -> (1, 0) -> ((1+1)/3, (0+0.5)/1.5).
        assert!((d.points[0][0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((d.points[0][1] - 1.0 / 3.0).abs() < 1e-12);
        // First inner point: t = 0 -> (0, 0.5) -> (1/3, 2/3).
        assert!((d.points[2][0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((d.points[2][1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn moons_are_seed_deterministic() {
        assert_eq!(two_moons(50, 0.08, 3), two_moons(50, 0.08, 3));
        assert_ne!(two_moons(50, 0.08, 3), two_moons(50, 0.08, 4));
    }

    #[test]
    fn blobs_round_robin_labels() {
        let d = gaussian_blobs(10, 3, 0.02, 0);
        assert_eq!(d.labels, vec![0, 1, 2, 0, 1, 2, 0, 1, 2, 0]);
        assert_eq!(d.num_classes, 3);
    }

    #[test]
    fn zero_spread_blobs_sit_on_centers() {
        let d = gaussian_blobs(4, 2, 0.0, 9);
        assert!((d.points[0][0] - 0.8).abs() < 1e-12);
        assert!((d.points[0][1] - 0.5).abs() < 1e-12);
        assert!((d.points[1][0] - 0.2).abs() < 1e-12);
        assert!((d.points[1][1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn blobs_stay_in_unit_square_and_are_deterministic() {
        let a = gaussian_blobs(300, 4, 0.5, 11);
        for p in &a.points {
            assert!((0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1]));
        }
        assert_eq!(a, gaussian_blobs(300, 4, 0.5, 11));
    }
}
