//! Independent oracles for the diversity analytics: a from-scratch
//! adjacency-matrix clustering implementation, a stratified Monte-Carlo
//! estimate of the threshold integral, and invariance under isometries.

use acg_core::{diversity_index, global_clustering, local_clustering};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn brute_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        sum += d * d;
    }
    sum.sqrt()
}

/// O(n^3) clustering straight from the definition: for each node, count
/// closed neighbor pairs over all ordered pairs of distinct neighbors.
fn brute_local_clustering(points: &[Vec<f64>], theta: f64) -> Vec<f64> {
    let n = points.len();
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && brute_distance(&points[i], &points[j]) <= theta {
                adj[i][j] = true;
            }
        }
    }
    (0..n)
        .map(|i| {
            let neighbors: Vec<usize> = (0..n).filter(|&j| adj[i][j]).collect();
            let deg = neighbors.len();
            if deg < 2 {
                return 0.0;
            }
            let mut closed = 0usize;
            for &j in &neighbors {
                for &k in &neighbors {
                    if j != k && adj[j][k] {
                        closed += 1;
                    }
                }
            }
            closed as f64 / (deg * (deg - 1)) as f64
        })
        .collect()
}

fn brute_global_clustering(points: &[Vec<f64>], theta: f64) -> f64 {
    let local = brute_local_clustering(points, theta);
    local.iter().sum::<f64>() / local.len() as f64
}

fn random_cloud(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..=1.0)).collect())
        .collect()
}

/// The bit-set implementation must agree exactly with the definition at
/// arbitrary thresholds and, crucially, at thresholds equal to realized
/// pairwise distances, where the inclusive boundary convention matters.
#[test]
fn clustering_matches_brute_force_exactly() {
    for seed in 0..30u64 {
        let n = 3 + (seed as usize % 8);
        let dim = 2 + (seed as usize % 2);
        let points = random_cloud(n, dim, 1000 + seed);

        let mut thetas = vec![0.0, 0.05, 0.3, 0.7, 1.4, 5.0];
        // Every realized pairwise distance is a decision boundary.
        for i in 0..n {
            for j in (i + 1)..n {
                thetas.push(brute_distance(&points[i], &points[j]));
            }
        }
        for &theta in &thetas {
            let expected = brute_local_clustering(&points, theta);
            let got = local_clustering(&points, theta).unwrap();
            assert_eq!(got, expected, "seed {seed} theta {theta}");
            let global = global_clustering(&points, theta).unwrap();
            assert_eq!(
                global,
                brute_global_clustering(&points, theta),
                "seed {seed} theta {theta}"
            );
        }
    }
}

/// Stratified Monte-Carlo oracle for the threshold integral. With N
/// jittered strata the only estimation error comes from the strata that
/// contain one of the at most n(n-1)/2 jump points of the piecewise
/// constant integrand, so |estimate - exact| <= n(n-1)/(2N) deterministically.
/// With n <= 10 and N = 1e5 that bound is 4.5e-4.
#[test]
fn diversity_index_matches_stratified_monte_carlo() {
    const SAMPLES: usize = 100_000;
    for seed in 0..8u64 {
        let n = 5 + (seed as usize % 6);
        let mut points = random_cloud(n, 2, 2000 + seed);
        if seed % 3 == 0 {
            // Include an exact duplicate: duplicates are mutually adjacent
            // at every threshold and must not confuse either computation.
            let copy = points[0].clone();
            points.push(copy);
        }
        let m = if seed % 2 == 0 { 2.0 } else { 10.0 };

        let exact = diversity_index(&points, m).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(77));
        let mut integral = 0.0;
        for i in 0..SAMPLES {
            let u: f64 = rng.random_range(0.0..1.0);
            let theta = (i as f64 + u) * m / SAMPLES as f64;
            integral += brute_global_clustering(&points, theta);
        }
        let monte_carlo = 1.0 - integral / SAMPLES as f64;

        assert!(
            (exact - monte_carlo).abs() <= 1e-3,
            "seed {seed}: exact {exact} vs monte carlo {monte_carlo}"
        );
    }
}

/// The index is a function of pairwise distances only, so rigid motions
/// of the cloud change it by at most floating-point noise.
#[test]
fn diversity_index_is_invariant_under_rotation_and_translation() {
    for seed in 0..10u64 {
        let points = random_cloud(7, 2, 3000 + seed);
        let m = 2.0;
        let base = diversity_index(&points, m).unwrap();

        let phi = 0.1 + seed as f64 * 0.37;
        let (s, c) = phi.sin_cos();
        let moved: Vec<Vec<f64>> = points
            .iter()
            .map(|p| vec![c * p[0] - s * p[1] + 0.25, s * p[0] + c * p[1] - 1.5])
            .collect();
        let rotated = diversity_index(&moved, m).unwrap();
        assert!(
            (base - rotated).abs() <= 1e-9,
            "seed {seed}: {base} vs {rotated}"
        );
    }
}
