//! Perron eigenpairs of small nonnegative matrices.

use alloc::vec;
use alloc::vec::Vec;

/// Dominant eigenvalue and right eigenvector (max-norm 1) of a nonnegative
/// row-major `k x k` matrix by power iteration. `None` when the eigenvalue
/// estimate has not settled to `tol` (relative) within `max_iter` steps.
pub(crate) fn perron_right(matrix: &[f64], k: usize, tol: f64, max_iter: usize) -> Option<(f64, Vec<f64>)> {
    let mut v = vec![1.0; k];
    let mut lambda = 0.0f64;
    let mut settled = 0;
    for _ in 0..max_iter {
        let mut next = vec![0.0; k];
        for i in 0..k {
            next[i] = (0..k).map(|j| matrix[i * k + j] * v[j]).sum();
        }
        let norm = next.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        if !(norm > 0.0) || !norm.is_finite() {
            return None;
        }
        for x in next.iter_mut() {
            *x /= norm;
        }
        let delta_v = v.iter().zip(&next).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let converged = (norm - lambda).abs() <= tol * norm && delta_v <= tol;
        lambda = norm;
        v = next;
        if converged {
            settled += 1;
            if settled >= 2 {
                return Some((lambda, v));
            }
        } else {
            settled = 0;
        }
    }
    None
}

/// Left eigenvector via the transpose.
pub(crate) fn perron_left(matrix: &[f64], k: usize, tol: f64, max_iter: usize) -> Option<(f64, Vec<f64>)> {
    let mut t = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            t[j * k + i] = matrix[i * k + j];
        }
    }
    perron_right(&t, k, tol, max_iter)
}
