//! Extended-precision evaluation of the auxiliary-matrix fidelity for one-
//! and two-mode covariances without q-p correlations.
//!
//! For `V = Q ⊕ P` in quadrature-major order the auxiliary matrix splits as
//! `V_aux = C ⊕ B` with
//!
//! ```text
//! C = (P1 + P2)⁻¹ (I/4 + P2 Q1),   B = (Q1 + Q2)⁻¹ (I/4 + Q2 P1)
//! ```
//!
//! and `V_aux Ω` has eigenvalues `±i v_k` with `v_k²` the eigenvalues of
//! `C B`. The determinant in the fidelity formula is then a product over
//! `k`, giving
//!
//! ```text
//! F⁴ = Π_k (2 v_k + √(4 v_k² - 1))² / (det(Q1 + Q2) det(P1 + P2)).
//! ```
//!
//! When an output mode is close to pure, `1 - F` is far below the f64
//! rounding level of the matrix route, so the whole chain is carried in
//! double-double.

use nalgebra::DMatrix;
use twofloat::TwoFloat;

use crate::error::{Error, Result};

type Dd = TwoFloat;

// TwoFloat / TwoFloat in twofloat 0.8 is only f64-accurate; one Newton
// correction on top of the f64 quotient restores double-double accuracy.
fn div(a: Dd, b: Dd) -> Dd {
    let q = a.hi() / b.hi();
    let r = a - b * q;
    Dd::from(q) + r / b.hi()
}

#[derive(Clone, Copy)]
struct Mat2([[Dd; 2]; 2]);

impl Mat2 {
    fn from_block(m: &DMatrix<f64>, offset: usize) -> Self {
        let e = |r, c| Dd::from(m[(offset + r, offset + c)]);
        Mat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }

    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        let e = |r: usize, c: usize| a[r][0] * b[0][c] + a[r][1] * b[1][c];
        Mat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    fn add_diag(self, x: Dd) -> Mat2 {
        let mut m = self.0;
        m[0][0] += x;
        m[1][1] += x;
        Mat2(m)
    }

    fn det(self) -> Dd {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    fn trace(self) -> Dd {
        self.0[0][0] + self.0[1][1]
    }

    /// `self⁻¹ · rhs` via the adjugate.
    fn solve(self, rhs: Mat2) -> Result<Mat2> {
        let d = self.det();
        if d <= Dd::from(0.0) {
            return Err(Error::numerical("V1 + V2 block is not positive definite"));
        }
        let m = self.0;
        let adj = Mat2([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]);
        let p = adj.mul(rhs).0;
        Ok(Mat2([
            [div(p[0][0], d), div(p[0][1], d)],
            [div(p[1][0], d), div(p[1][1], d)],
        ]))
    }
}

/// True when the covariance has no q-p cross block and at most two modes.
pub(crate) fn applies(v: &DMatrix<f64>) -> bool {
    let n = v.nrows() / 2;
    if !(1..=2).contains(&n) {
        return false;
    }
    (0..n).all(|r| (n..2 * n).all(|c| v[(r, c)] == 0.0 && v[(c, r)] == 0.0))
}

/// `√(1 + μ) + √μ`, i.e. `2 v + √(4 v² - 1)` with `μ = 4 v² - 1`. Slightly
/// negative `μ` from states at the physicality tolerance count as pure.
fn mode_factor(mu: Dd, scale: Dd) -> Result<Dd> {
    let zero = Dd::from(0.0);
    let mu = if mu >= zero {
        mu
    } else if -mu <= Dd::from(1e-8) * scale.max(Dd::from(1.0)) {
        zero
    } else {
        return Err(Error::numerical(format!(
            "auxiliary symplectic eigenvalue below 1/2 (4v^2 - 1 = {:e})",
            f64::from(mu)
        )));
    };
    Ok((mu + 1.0).sqrt() + mu.sqrt())
}

/// `F_cov⁴ - 1` for quadrature-major, q-p-uncorrelated covariances.
///
/// The excesses `μ_k = 4 v_k² - 1` are the eigenvalues of
/// `4 (P1 + P2)⁻¹ (P2 Q2 - I/4) (Q1 + Q2)⁻¹ (Q1 P1 - I/4)`, which vanishes
/// exactly on pure modes; forming them this way avoids subtracting 1 from
/// `4 v²`.
pub(crate) fn fidelity_fourth_minus_one(v1: &DMatrix<f64>, v2: &DMatrix<f64>) -> Result<f64> {
    let n = v1.nrows() / 2;
    let quarter = Dd::from(0.25);
    let (num, den) = if n == 1 {
        let (q1, p1) = (Dd::from(v1[(0, 0)]), Dd::from(v1[(1, 1)]));
        let (q2, p2) = (Dd::from(v2[(0, 0)]), Dd::from(v2[(1, 1)]));
        let (sq, sp) = (q1 + q2, p1 + p2);
        let den = sq * sp;
        let mu = div((p2 * q2 - quarter) * (q1 * p1 - quarter) * 4.0, den);
        let f = mode_factor(mu, Dd::from(1.0))?;
        (f * f, den)
    } else {
        let (q1, p1) = (Mat2::from_block(v1, 0), Mat2::from_block(v1, 2));
        let (q2, p2) = (Mat2::from_block(v2, 0), Mat2::from_block(v2, 2));
        let (sq, sp) = (q1.add(q2), p1.add(p2));
        let x1 = q1.mul(p1).add_diag(-quarter);
        let y2 = p2.mul(q2).add_diag(-quarter);
        let e = sp.solve(y2.mul(sq.solve(x1)?))?;
        let (t, d) = (e.trace() * 4.0, e.det() * 16.0);
        let zero = Dd::from(0.0);
        let mut disc = t * t - d * 4.0;
        if disc < zero {
            if -disc > Dd::from(1e-20) * t * t {
                return Err(Error::numerical(
                    "auxiliary matrix has a complex symplectic spectrum",
                ));
            }
            disc = zero;
        }
        let big = (t + disc.sqrt()) / 2.0;
        let small = if big > zero { div(d, big) } else { zero };
        let (f1, f2) = (mode_factor(big, t.abs())?, mode_factor(small, t.abs())?);
        (f1 * f1 * f2 * f2, sq.det() * sp.det())
    };
    if den <= Dd::from(0.0) {
        return Err(Error::numerical("det(V1 + V2) is not positive"));
    }
    Ok(f64::from(div(num - den, den)))
}
