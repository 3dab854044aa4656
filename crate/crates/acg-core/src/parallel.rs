//! Order-preserving map helpers with an optional data-parallel backend.
//!
//! Everything the crate parallelizes (restart batches, sliding-window
//! analytics, per-input campaigns) is an independent map over a slice, so a
//! single pair of helpers keeps the policy in one place: [`par_map`] fans out
//! across the rayon pool when the `parallel` feature is enabled and falls
//! back to [`seq_map`] otherwise. Results always come back in input order,
//! so output never depends on thread count or scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, in parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Sequential fallback used when the `parallel` feature is off.
#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    seq_map(items, f)
}

/// Sequential reference implementation: a plain in-order map.
pub fn seq_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_backends_agree_and_preserve_order() {
        let items: Vec<u64> = (0..1000).collect();
        // Uneven per-item cost so parallel scheduling actually interleaves.
        let work = |&n: &u64| -> u64 {
            let mut acc = n;
            for _ in 0..(n % 97) {
                acc = acc.wrapping_mul(6364136223846793005).wrapping_add(1);
            }
            acc
        };
        assert_eq!(par_map(&items, work), seq_map(&items, work));
    }

    #[test]
    fn results_line_up_with_inputs() {
        let items = vec![3.0f64, 1.0, 4.0, 1.5];
        let doubled = par_map(&items, |x| 2.0 * x);
        assert_eq!(doubled, vec![6.0, 2.0, 8.0, 3.0]);
    }
}
