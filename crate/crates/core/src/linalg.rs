//! Small dense-Cholesky helpers shared by the samplers.
//!
//! Factorizations go through LAPACK (`dpotrf`); the triangular solves are
//! hand-rolled because they are O(p^2) and called on vectors only.

use ndarray::prelude::*;
use ndarray_linalg::cholesky::{CholeskyInto, UPLO};

/// Lower Cholesky factor of a symmetric positive-definite matrix.
/// Returns `None` when the matrix is numerically indefinite.
pub(crate) fn cholesky_lower(m: Array2<f64>) -> Option<Array2<f64>> {
    m.cholesky_into(UPLO::Lower).ok()
}

/// Solve `L x = b` in place for lower-triangular `L`.
pub(crate) fn solve_lower(l: &Array2<f64>, b: &mut Array1<f64>) {
    let p = l.nrows();
    for i in 0..p {
        let row = l.row(i);
        let mut acc = b[i];
        for j in 0..i {
            acc -= row[j] * b[j];
        }
        b[i] = acc / row[i];
    }
}

/// Solve `L' x = b` in place, reading the lower factor `L`.
pub(crate) fn solve_lower_transpose(l: &Array2<f64>, b: &mut Array1<f64>) {
    let p = l.nrows();
    for i in (0..p).rev() {
        let mut acc = b[i];
        for j in (i + 1)..p {
            acc -= l[[j, i]] * b[j];
        }
        b[i] = acc / l[[i, i]];
    }
}
