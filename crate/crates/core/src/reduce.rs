//! Order-fixed summation.
//!
//! Every sum that feeds a reported number goes through [`pairwise_sum`],
//! whose tree shape depends only on the input length. Parallel loops compute
//! per-row partial sums into a vector first and reduce that vector here, so
//! the result does not depend on the number of worker threads.

use rayon::prelude::*;

const LEAF: usize = 16;

/// Sum with a balanced binary tree over blocks of 16.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    // split on a multiple of LEAF so the shape is a function of len alone
    let blocks = xs.len().div_ceil(LEAF);
    let mid = (blocks / 2) * LEAF;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `Σ_i row(i)` with rows evaluated in parallel and reduced by
/// [`pairwise_sum`].
pub fn par_row_sum<F>(rows: usize, row: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let parts = par_rows(rows, row);
    pairwise_sum(&parts)
}

/// Evaluates `row(i)` for every `i` in parallel, keeping index order.
pub fn par_rows<T, F>(rows: usize, row: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..rows).into_par_iter().map(row).collect()
}
