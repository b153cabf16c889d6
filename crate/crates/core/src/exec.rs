//! Execution strategy for the embarrassingly parallel kernels (quadrature
//! cells, Monte Carlo shards). Work is split into a fixed number of
//! independent units and recombined in a fixed order, so the sequential and
//! data-parallel strategies produce bit-identical results.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Seq,
    /// Rayon-backed; degrades to Seq when built without the `parallel`
    /// feature.
    Par,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Par
        } else {
            Exec::Seq
        }
    }
}

impl Exec {
    /// f(0), f(1), ..., f(len-1) collected in index order. Each unit is
    /// computed independently, so scheduling cannot change any result.
    pub fn map_indexed<U, F>(self, len: usize, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        match self {
            Exec::Seq => (0..len).map(f).collect(),
            Exec::Par => {
                #[cfg(feature = "parallel")]
                {
                    use rayon::prelude::*;
                    (0..len).into_par_iter().map(f).collect()
                }
                #[cfg(not(feature = "parallel"))]
                {
                    (0..len).map(f).collect()
                }
            }
        }
    }
}

/// Fixed-tree pairwise reduction: the combination order depends only on the
/// slice length, never on thread scheduling.
pub fn pairwise_reduce<T: Clone>(items: &[T], add: &impl Fn(&T, &T) -> T) -> Option<T> {
    match items.len() {
        0 => None,
        1 => Some(items[0].clone()),
        n => {
            let mid = n / 2;
            let a = pairwise_reduce(&items[..mid], add)?;
            let b = pairwise_reduce(&items[mid..], add)?;
            Some(add(&a, &b))
        }
    }
}

/// Pairwise float summation: deterministic and with O(log n) error growth.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    pairwise_reduce(xs, &|a, b| a + b).unwrap_or(0.0)
}
