//! Diversity analytics for point clouds of search iterates.
//!
//! A cloud is reduced to a family of threshold graphs: nodes are points and
//! two distinct points are adjacent when their Euclidean distance is at most
//! a threshold `theta` (so exact duplicates are adjacent at every
//! threshold). The global clustering coefficient of that graph, averaged
//! over thresholds, measures how clumped the cloud is; the diversity index
//! flips it so that spread-out clouds score high:
//!
//! `DI = 1 - (1/M) * integral of C(theta) over [0, M]`
//!
//! `C(theta)` is a right-continuous step function that only changes where
//! `theta` crosses a pairwise distance, so the integral is evaluated exactly
//! as a finite sum over the segments between sorted distinct distances.

use crate::error::{CoreError, Result};
use crate::parallel::par_map;
use crate::vecmath::dist;

/// Dense bitset adjacency for small graphs: row `i` packs the neighbor set
/// of node `i` into `ceil(n / 64)` words.
struct BitAdjacency {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitAdjacency {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        Self {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    fn add_edge(&mut self, i: usize, j: usize) {
        debug_assert!(i != j);
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
        self.bits[j * self.words + i / 64] |= 1 << (i % 64);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    fn common_neighbors(&self, i: usize, j: usize) -> usize {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Local clustering coefficient of node `i`: closed wedges over wedges,
    /// with the degree < 2 convention of 0.
    fn local_clustering(&self, i: usize) -> f64 {
        let deg = self.degree(i);
        if deg < 2 {
            return 0.0;
        }
        // Summing |N(i) & N(j)| over neighbors j counts each triangle
        // through i twice, exactly matching the 2*T_i numerator.
        let mut closed = 0usize;
        for j in 0..self.n {
            if j != i && self.row(i)[j / 64] >> (j % 64) & 1 == 1 {
                closed += self.common_neighbors(i, j);
            }
        }
        closed as f64 / (deg * (deg - 1)) as f64
    }

    fn mean_clustering(&self) -> f64 {
        let total: f64 = (0..self.n).map(|i| self.local_clustering(i)).sum();
        total / self.n as f64
    }
}

fn check_cloud(points: &[Vec<f64>], min_points: usize) -> Result<()> {
    if points.len() < min_points {
        return Err(CoreError::InvalidParameter(format!(
            "cloud has {} points, need at least {min_points}",
            points.len()
        )));
    }
    let d = points[0].len();
    if d == 0 {
        return Err(CoreError::InvalidParameter(
            "cloud points need at least one coordinate".into(),
        ));
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != d {
            return Err(CoreError::DimensionMismatch {
                expected: d,
                actual: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidParameter(format!(
                "point {i} has a non-finite coordinate"
            )));
        }
    }
    Ok(())
}

/// Pairwise distances as a flat upper-triangle list in (i, j) order, i < j.
fn pairwise_distances(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(dist(&points[i], &points[j]));
        }
    }
    out
}

fn graph_at(distances: &[f64], n: usize, theta: f64) -> BitAdjacency {
    let mut adj = BitAdjacency::new(n);
    let mut idx = 0;
    for i in 0..n {
        for j in i + 1..n {
            if distances[idx] <= theta {
                adj.add_edge(i, j);
            }
            idx += 1;
        }
    }
    adj
}

/// Local clustering coefficients of the threshold graph at `theta`.
pub fn local_clustering(points: &[Vec<f64>], theta: f64) -> Result<Vec<f64>> {
    check_cloud(points, 1)?;
    if !theta.is_finite() || theta < 0.0 {
        return Err(CoreError::InvalidParameter(format!(
            "threshold must be finite and >= 0, got {theta}"
        )));
    }
    let adj = graph_at(&pairwise_distances(points), points.len(), theta);
    Ok((0..points.len()).map(|i| adj.local_clustering(i)).collect())
}

/// Global (mean local) clustering coefficient of the threshold graph.
pub fn global_clustering(points: &[Vec<f64>], theta: f64) -> Result<f64> {
    Ok(local_clustering(points, theta)?.iter().sum::<f64>() / points.len() as f64)
}

/// Diversity index of a cloud of at least 3 points over thresholds
/// `[0, m]`. Exact: the clustering curve is integrated segment by segment
/// between consecutive distinct pairwise distances, evaluating each segment
/// at its left endpoint (the curve is right-continuous). A cloud whose
/// largest pairwise distance exceeds `m` is accepted with a warning, since
/// the index then ignores structure beyond the threshold range.
pub fn diversity_index(points: &[Vec<f64>], m: f64) -> Result<f64> {
    check_cloud(points, 3)?;
    if !m.is_finite() || m <= 0.0 {
        return Err(CoreError::InvalidParameter(format!(
            "threshold range m must be positive and finite, got {m}"
        )));
    }
    let n = points.len();
    let distances = pairwise_distances(points);

    let dmax = distances.iter().cloned().fold(0.0, f64::max);
    if dmax > m {
        log::warn!(
            "largest pairwise distance {dmax} exceeds the threshold range {m}; \
             the diversity index only integrates thresholds up to {m}"
        );
    }

    let mut events: Vec<f64> = distances
        .iter()
        .cloned()
        .filter(|&d| d > 0.0 && d < m)
        .collect();
    events.sort_by(|a, b| a.partial_cmp(b).unwrap());
    events.dedup();

    let mut integral = 0.0;
    let mut left = 0.0;
    for &event in events.iter().chain(std::iter::once(&m)) {
        let c = graph_at(&distances, n, left).mean_clustering();
        integral += c * (event - left);
        left = event;
    }
    Ok(1.0 - integral / m)
}

/// Sliding-window diversity trace: entry `k` is the diversity index of the
/// `window` consecutive points ending at `points[window - 1 + k]`. Clouds
/// shorter than the window give an empty trace; windows below 3 points are
/// rejected. Windows are evaluated in parallel when the feature is on.
pub fn di_trace(points: &[Vec<f64>], window: usize, m: f64) -> Result<Vec<f64>> {
    if window < 3 {
        return Err(CoreError::InvalidParameter(format!(
            "diversity window must cover at least 3 points, got {window}"
        )));
    }
    if points.len() < window {
        return Ok(Vec::new());
    }
    check_cloud(points, window)?;
    let starts: Vec<usize> = (0..=points.len() - window).collect();
    par_map(&starts, |&s| diversity_index(&points[s..s + window], m))
        .into_iter()
        .collect()
}
