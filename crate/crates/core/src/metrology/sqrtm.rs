//! Principal square root of a real matrix whose spectrum avoids the closed
//! negative real axis.
//!
//! The primary route is a complex Schur factorisation `M = Q T Q*` followed
//! by the triangular recurrence for `√T`; the real part of `Q √T Q*` is kept
//! after checking the imaginary residue. Denman-Beavers iteration is the
//! fallback when the Schur route misses the residual target.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{inverse, max_abs};

const IMAG_RESIDUE_TOL: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-10;

pub fn matrix_sqrt_principal(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::domain("matrix square root needs a square matrix"));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::numerical(
            "matrix square root of a non-finite matrix",
        ));
    }
    let scale = max_abs(m);
    if scale == 0.0 {
        return Ok(m.clone());
    }
    match schur_sqrt(m, scale) {
        Ok(r) if relative_residual(&r, m, scale) < RESIDUAL_TOL => Ok(r),
        Ok(_) => fallback(m, scale),
        // a negative real eigenvalue has no principal root; no fallback helps
        Err(e @ Error::Domain(_)) => Err(e),
        Err(_) => fallback(m, scale),
    }
}

fn fallback(m: &DMatrix<f64>, scale: f64) -> Result<DMatrix<f64>> {
    let r = matrix_sqrt_denman_beavers(m)?;
    let res = relative_residual(&r, m, scale);
    if res < RESIDUAL_TOL {
        Ok(r)
    } else {
        Err(Error::numerical(format!(
            "matrix square root residual {res:e} exceeds {RESIDUAL_TOL:e}"
        )))
    }
}

fn relative_residual(r: &DMatrix<f64>, m: &DMatrix<f64>, scale: f64) -> f64 {
    max_abs(&(r * r - m)) / scale
}

fn schur_sqrt(m: &DMatrix<f64>, scale: f64) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let mc: DMatrix<Complex64> = m.map(|x| Complex64::new(x, 0.0));
    let schur = mc
        .try_schur(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::numerical("complex Schur factorisation did not converge"))?;
    let (q, t) = schur.unpack();

    // eigenvalues that are zero up to rounding are treated as exact zeros
    let zero_tol = 64.0 * f64::EPSILON * scale;
    let mut root = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let lambda = t[(j, j)];
        if lambda.norm() <= zero_tol {
            root[(j, j)] = Complex64::new(0.0, 0.0);
        } else if lambda.re < 0.0 && lambda.im.abs() <= zero_tol {
            return Err(Error::domain(format!(
                "eigenvalue {lambda} lies on the negative real axis; no principal square root"
            )));
        } else {
            root[(j, j)] = lambda.sqrt();
        }
    }
    for j in 0..n {
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in (i + 1)..j {
                s -= root[(i, k)] * root[(k, j)];
            }
            let den = root[(i, i)] + root[(j, j)];
            root[(i, j)] = if den.norm() > 0.0 {
                s / den
            } else if s.norm() <= zero_tol {
                Complex64::new(0.0, 0.0)
            } else {
                return Err(Error::numerical(
                    "square root does not exist (defective zero eigenvalue)",
                ));
            };
        }
    }
    let full = &q * root * q.adjoint();
    let imag = full.iter().fold(0.0_f64, |acc, z| acc.max(z.im.abs()));
    let real = full.map(|z| z.re);
    if imag > IMAG_RESIDUE_TOL * max_abs(&real).max(1.0) {
        return Err(Error::numerical(format!(
            "imaginary residue {imag:e} in matrix square root"
        )));
    }
    Ok(real)
}

/// Denman-Beavers coupled iteration `Y <- (Y + Z⁻¹)/2`, `Z <- (Z + Y⁻¹)/2`.
pub fn matrix_sqrt_denman_beavers(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let mut y = m.clone();
    let mut z = DMatrix::identity(n, n);
    for _ in 0..100 {
        let y_inv = inverse(&y)?;
        let z_inv = inverse(&z)?;
        let y_next = (&y + z_inv) * 0.5;
        let z_next = (&z + y_inv) * 0.5;
        let step = max_abs(&(&y_next - &y)) / max_abs(&y_next).max(f64::MIN_POSITIVE);
        y = y_next;
        z = z_next;
        if step < 1e-15 {
            return Ok(y);
        }
    }
    if y.iter().all(|x| x.is_finite()) {
        Ok(y)
    } else {
        Err(Error::numerical("Denman-Beavers iteration diverged"))
    }
}
