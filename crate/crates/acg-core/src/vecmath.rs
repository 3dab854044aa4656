//! Small dense vector helpers used throughout the crate.
//!
//! Everything operates on plain `&[f64]` slices; the problem sizes here
//! (points up to a few hundred coordinates, matrices up to a few dozen rows)
//! do not justify a linear algebra dependency.

/// Inner product of two equally sized vectors.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Euclidean distance between two equally sized vectors.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Component difference `a - b`.
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Sign function with `sign(0) = 0`, so a zero component leaves its
/// coordinate unmoved. Note that `f64::signum` maps +-0.0 to +-1.0 and is
/// not what sign-step updates want.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// True when every component is exactly 0.0 (or -0.0).
pub fn is_zero(v: &[f64]) -> bool {
    v.iter().all(|&x| x == 0.0)
}

/// Dense symmetric matrix-vector product for a row-major `n x n` matrix.
pub fn matvec(a: &[f64], x: &[f64], n: usize) -> Vec<f64> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(x.len(), n);
    (0..n).map(|i| dot(&a[i * n..(i + 1) * n], x)).collect()
}

/// Cholesky factorization attempt for a row-major symmetric matrix.
/// Returns false when a non-positive pivot shows the matrix is not
/// positive definite.
pub fn cholesky_is_spd(a: &[f64], n: usize) -> bool {
    debug_assert_eq!(a.len(), n * n);
    let mut l = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return false;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_and_norms() {
        assert_eq!(dot(&[1.0, 2.0], &[3.0, 4.0]), 11.0);
        assert_eq!(norm(&[3.0, 4.0]), 5.0);
        assert_eq!(dist(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
        assert_eq!(sub(&[3.0, 4.0], &[1.0, 1.0]), vec![2.0, 3.0]);
    }

    #[test]
    fn sign_maps_zero_to_zero() {
        assert_eq!(sign(2.5), 1.0);
        assert_eq!(sign(-0.1), -1.0);
        assert_eq!(sign(0.0), 0.0);
        assert_eq!(sign(-0.0), 0.0);
    }

    #[test]
    fn zero_vector_detection() {
        assert!(is_zero(&[0.0, -0.0]));
        assert!(!is_zero(&[0.0, 1e-300]));
    }

    #[test]
    fn matvec_small() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(matvec(&a, &[1.0, 1.0], 2), vec![3.0, 7.0]);
    }

    #[test]
    fn cholesky_accepts_spd_rejects_indefinite() {
        let spd = [4.0, 1.0, 1.0, 3.0];
        assert!(cholesky_is_spd(&spd, 2));
        let indefinite = [1.0, 2.0, 2.0, 1.0];
        assert!(!cholesky_is_spd(&indefinite, 2));
        let semidefinite = [1.0, 1.0, 1.0, 1.0];
        assert!(!cholesky_is_spd(&semidefinite, 2));
    }
}
