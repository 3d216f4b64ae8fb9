//! Small dense-matrix helpers shared by the state, channel and fidelity code.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest entrywise deviation from symmetry, `max |m_ij - m_ji|`.
pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Infinity norm taken entrywise, `max |m_ij|`.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::numerical("singular matrix in inversion"))
}

/// Natural log of `|det m|` together with the determinant sign, via LU.
pub fn log_abs_det(m: &DMatrix<f64>) -> (f64, f64) {
    let lu = m.clone().lu();
    let u = lu.u();
    let mut log = 0.0;
    let mut sign = if lu.p().determinant::<f64>() < 0.0 {
        -1.0
    } else {
        1.0
    };
    for i in 0..u.nrows() {
        let d = u[(i, i)];
        if d < 0.0 {
            sign = -sign;
        }
        log += d.abs().ln();
    }
    (log, sign)
}

/// `s * m * s^T`.
pub fn congruence(s: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    s * m * s.transpose()
}

/// Lifts a 4x4 two-mode operator (mode-major, acting on modes `(i, j)` in
/// that order) to the full `2n x 2n` phase space.
pub fn embed_two_mode(n_modes: usize, i: usize, j: usize, op: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(
        i != j && i < n_modes && j < n_modes,
        "bad mode pair ({i}, {j})"
    );
    assert_eq!(op.shape(), (4, 4));
    let mut full = DMatrix::identity(2 * n_modes, 2 * n_modes);
    let idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1];
    for (r, &gr) in idx.iter().enumerate() {
        for (c, &gc) in idx.iter().enumerate() {
            full[(gr, gc)] = op[(r, c)];
        }
    }
    full
}

/// Block-diagonal direct sum `a ⊕ b`.
pub fn direct_sum(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (na, nb) = (a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(na + nb, na + nb);
    out.view_mut((0, 0), (na, na)).copy_from(a);
    out.view_mut((na, na), (nb, nb)).copy_from(b);
    out
}

pub fn concat(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}
