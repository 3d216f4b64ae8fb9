//! Uhlmann (root) fidelity between Gaussian states via the auxiliary-matrix
//! formula
//!
//! ```text
//! V_aux = Ωᵀ (V1 + V2)⁻¹ (Ω/4 + V2 Ω V1)
//! F_cov = [ det(2 (√(I + (V_aux Ω)⁻²/4) + I) V_aux) / det(V1 + V2) ]^(1/4)
//! F     = F_cov · exp(-¼ δᵀ (V1 + V2)⁻¹ δ)
//! ```
//!
//! Covariances enter the kernel in quadrature-major order. The `log_*`
//! variants keep `ln F` so that `1 - F` can be formed without cancellation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::{
    reorder, symplectic_eigenvalues, GaussianState, Ordering, SymplecticForm, PHYSICALITY_TOL,
    SYMMETRY_TOL,
};
use crate::linalg::{inverse, log_abs_det, max_asymmetry};

use super::spectral;
use super::sqrtm::matrix_sqrt_principal;

/// Largest tolerated `F - 1` before clamping turns into an error.
const CLAMP_TOL: f64 = 1e-9;

fn check_cov(v: &DMatrix<f64>, ordering: Ordering, which: &str) -> Result<()> {
    if !v.is_square() || !v.nrows().is_multiple_of(2) || v.nrows() == 0 {
        return Err(Error::domain(format!("{which} must be 2n x 2n")));
    }
    if max_asymmetry(v) > SYMMETRY_TOL {
        return Err(Error::domain(format!("{which} is not symmetric")));
    }
    let mode_major = reorder(v, ordering, Ordering::ModeMajor)?;
    let nu = symplectic_eigenvalues(&mode_major)?[0];
    if nu < 0.5 - PHYSICALITY_TOL {
        return Err(Error::domain(format!(
            "{which} is unphysical (smallest symplectic eigenvalue {nu})"
        )));
    }
    Ok(())
}

fn clamp(log_f: f64) -> Result<f64> {
    if !log_f.is_finite() {
        return Err(Error::numerical(format!(
            "fidelity evaluated to exp({log_f})"
        )));
    }
    if log_f > CLAMP_TOL {
        return Err(Error::numerical(format!(
            "fidelity exceeds 1 by {:e}",
            log_f.exp_m1()
        )));
    }
    Ok(log_f.min(0.0))
}

/// `ln F_cov` for quadrature-major covariances; no input validation.
///
/// Covariances without q-p correlations on at most two modes take the
/// extended-precision spectral route, everything else the matrix route.
pub(crate) fn log_fidelity_cov(v1: &DMatrix<f64>, v2: &DMatrix<f64>) -> Result<f64> {
    if v1 == v2 {
        return Ok(0.0);
    }
    if spectral::applies(v1) && spectral::applies(v2) {
        return Ok(0.25 * spectral::fidelity_fourth_minus_one(v1, v2)?.ln_1p());
    }
    log_fidelity_cov_matrix(v1, v2)
}

fn log_fidelity_cov_matrix(v1: &DMatrix<f64>, v2: &DMatrix<f64>) -> Result<f64> {
    if v1 == v2 {
        return Ok(0.0);
    }
    let n = v1.nrows();
    let omega = SymplecticForm::new(n / 2, Ordering::QuadratureMajor);
    let omega = omega.matrix();
    let sum = v1 + v2;
    let sum_inv = inverse(&sum)?;
    let v_aux = omega.transpose() * &sum_inv * (omega * 0.25 + v2 * omega * v1);
    let a_inv = inverse(&(&v_aux * omega))?;
    let eye = DMatrix::<f64>::identity(n, n);
    let inner = &eye + (&a_inv * &a_inv) * 0.25;
    let root = matrix_sqrt_principal(&inner)?;
    let num = (root + &eye) * &v_aux * 2.0;
    let (log_num, sign_num) = log_abs_det(&num);
    let (log_den, sign_den) = log_abs_det(&sum);
    if sign_num <= 0.0 || sign_den <= 0.0 {
        return Err(Error::numerical(
            "non-positive determinant in the fidelity formula",
        ));
    }
    Ok(0.25 * (log_num - log_den))
}

/// `-¼ δᵀ (V1 + V2)⁻¹ δ`.
pub(crate) fn log_displacement_factor(sum: &DMatrix<f64>, delta: &DVector<f64>) -> Result<f64> {
    if delta.iter().all(|&d| d == 0.0) {
        return Ok(0.0);
    }
    let x = sum
        .clone()
        .cholesky()
        .ok_or_else(|| Error::numerical("V1 + V2 is not positive definite"))?
        .solve(delta);
    Ok(-0.25 * delta.dot(&x))
}

/// Fidelity of two zero-mean states given by quadrature-major covariances.
pub fn fidelity_zero_mean(v1: &DMatrix<f64>, v2: &DMatrix<f64>) -> Result<f64> {
    if v1.shape() != v2.shape() {
        return Err(Error::domain("covariances have different dimensions"));
    }
    check_cov(v1, Ordering::QuadratureMajor, "V1")?;
    check_cov(v2, Ordering::QuadratureMajor, "V2")?;
    Ok(clamp(log_fidelity_cov(v1, v2)?)?.exp())
}

/// [`fidelity_zero_mean`] forced through the general f64 matrix kernel.
///
/// Loses accuracy when both states are close to pure; kept for
/// cross-checking and for callers that want one code path.
pub fn fidelity_zero_mean_matrix(v1: &DMatrix<f64>, v2: &DMatrix<f64>) -> Result<f64> {
    if v1.shape() != v2.shape() {
        return Err(Error::domain("covariances have different dimensions"));
    }
    check_cov(v1, Ordering::QuadratureMajor, "V1")?;
    check_cov(v2, Ordering::QuadratureMajor, "V2")?;
    Ok(clamp(log_fidelity_cov_matrix(v1, v2)?)?.exp())
}

/// Fidelity of two states sharing covariance `v` whose means differ by `delta`.
pub fn fidelity_displaced(v: &DMatrix<f64>, delta: &DVector<f64>) -> Result<f64> {
    if !v.is_square() || v.nrows() != delta.len() {
        return Err(Error::domain(format!(
            "dimension mismatch: covariance {}x{}, delta of length {}",
            v.nrows(),
            v.ncols(),
            delta.len()
        )));
    }
    let log_f = log_displacement_factor(&(v * 2.0), delta)?;
    Ok(clamp(log_f)?.exp())
}

/// `ln F` for two arbitrary Gaussian states of equal mode count.
pub fn log_fidelity(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    if s1.n_modes() != s2.n_modes() {
        return Err(Error::domain(format!(
            "mode counts differ ({} vs {})",
            s1.n_modes(),
            s2.n_modes()
        )));
    }
    let log_cov = log_fidelity_cov(&s1.cov_quadrature_major(), &s2.cov_quadrature_major())?;
    let delta = s2.mean() - s1.mean();
    let log_disp = log_displacement_factor(&(s1.cov() + s2.cov()), &delta)?;
    clamp(log_cov + log_disp)
}

/// Fidelity of two arbitrary Gaussian states; the covariance part times the
/// displacement factor.
pub fn fidelity_general(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    Ok(log_fidelity(s1, s2)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{coherent_state, thermal_state, TwoModeCov};

    fn thermal_oracle(n1: f64, n2: f64) -> f64 {
        1.0 / (((n1 + 1.0) * (n2 + 1.0)).sqrt() - (n1 * n2).sqrt())
    }

    fn embed(n: f64) -> DMatrix<f64> {
        // thermal ⊗ vacuum, quadrature-major
        thermal_state(n)
            .unwrap()
            .tensor(&GaussianState::vacuum(1))
            .cov_quadrature_major()
    }

    #[test]
    fn identical_states() {
        let v = TwoModeCov::new(3.0, 5.0, -1.0, -1.0).to_cov();
        let q = reorder(&v, Ordering::ModeMajor, Ordering::QuadratureMajor).unwrap();
        assert_eq!(fidelity_zero_mean(&q, &q).unwrap(), 1.0);
        // a perturbed copy still goes through the full kernel
        let mut q2 = q.clone();
        q2[(0, 0)] += 1e-13;
        assert!((fidelity_zero_mean(&q, &q2).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn thermal_vs_vacuum() {
        let f = fidelity_zero_mean(&embed(0.0), &embed(1.0)).unwrap();
        assert!((f - 0.5_f64.sqrt()).abs() < 1e-12);
        assert!((f - thermal_oracle(0.0, 1.0)).abs() < 1e-12);
        let f = fidelity_zero_mean(&embed(2.5), &embed(0.7)).unwrap();
        assert!((f - thermal_oracle(2.5, 0.7)).abs() < 1e-10);
    }

    #[test]
    fn symmetric_in_arguments() {
        let a = reorder(
            &TwoModeCov::new(3.0, 5.0, -1.0, -1.5).to_cov(),
            Ordering::ModeMajor,
            Ordering::QuadratureMajor,
        )
        .unwrap();
        let b = reorder(
            &TwoModeCov::new(2.0, 6.0, 0.5, -0.3).to_cov(),
            Ordering::ModeMajor,
            Ordering::QuadratureMajor,
        )
        .unwrap();
        let fab = fidelity_zero_mean(&a, &b).unwrap();
        let fba = fidelity_zero_mean(&b, &a).unwrap();
        assert!((fab - fba).abs() < 1e-12);
        assert!(fab > 0.0 && fab < 1.0);
    }

    #[test]
    fn displaced_examples() {
        let vac = DMatrix::identity(2, 2) * 0.5;
        assert_eq!(fidelity_displaced(&vac, &DVector::zeros(2)).unwrap(), 1.0);
        let delta = DVector::from_vec(vec![1.0, 1.0]);
        let f = fidelity_displaced(&vac, &delta).unwrap();
        assert!((f - (-0.5_f64).exp()).abs() < 1e-15);
        assert!(fidelity_displaced(&vac, &DVector::zeros(4)).is_err());

        // coherent states through a thermal-loss channel
        let (t0, omega, n, tau, dtau): (f64, f64, f64, f64, f64) = (0.4, 1.83, 20.0, 0.3, 1e-2);
        let a_prime = t0 / 2.0 + (1.0 - t0) * omega;
        let x = coherent_state(n, 0.0).unwrap().mean().clone();
        let delta = &x * (t0.sqrt() * ((tau + dtau).sqrt() - tau.sqrt()));
        let f = fidelity_displaced(&(DMatrix::identity(2, 2) * a_prime), &delta).unwrap();
        let gap = (tau + dtau).sqrt() - tau.sqrt();
        let expected = (-(t0 / (4.0 * a_prime)) * gap * gap * n).exp();
        assert!((f - expected).abs() < 1e-14);
    }

    #[test]
    fn general_combines_parts() {
        let s1 = coherent_state(3.0, 0.2).unwrap();
        assert_eq!(fidelity_general(&s1, &s1).unwrap(), 1.0);
        let s2 = coherent_state(3.5, 0.2).unwrap();
        let f = fidelity_general(&s1, &s2).unwrap();
        let d = fidelity_displaced(s1.cov(), &(s2.mean() - s1.mean())).unwrap();
        assert!((f - d).abs() < 1e-15);

        let t1 = thermal_state(0.4).unwrap();
        let t2 = thermal_state(1.9).unwrap();
        let f = fidelity_general(&t1, &t2).unwrap();
        let z = fidelity_zero_mean(&t1.cov_quadrature_major(), &t2.cov_quadrature_major()).unwrap();
        assert_eq!(f, z);
        assert!((f - thermal_oracle(0.4, 1.9)).abs() < 1e-10);
        assert!(fidelity_general(&t1, &GaussianState::vacuum(2)).is_err());
    }

    #[test]
    fn spectral_and_matrix_routes_agree() {
        let pairs = [
            (
                TwoModeCov::new(3.0, 5.0, -1.0, -1.0),
                TwoModeCov::new(3.2, 4.9, -1.1, -0.8),
            ),
            (
                TwoModeCov::new(1.0, 2.0, 0.4, 0.1),
                TwoModeCov::new(0.9, 2.5, -0.2, 0.3),
            ),
            (
                TwoModeCov::new(10.0, 0.6, 0.0, 0.0),
                TwoModeCov::new(7.0, 0.7, 0.0, 0.0),
            ),
        ];
        for (a, b) in pairs {
            let qa = reorder(&a.to_cov(), Ordering::ModeMajor, Ordering::QuadratureMajor).unwrap();
            let qb = reorder(&b.to_cov(), Ordering::ModeMajor, Ordering::QuadratureMajor).unwrap();
            let fs = fidelity_zero_mean(&qa, &qb).unwrap();
            let fm = fidelity_zero_mean_matrix(&qa, &qb).unwrap();
            assert!((fs - fm).abs() < 1e-10, "{fs} vs {fm}");
        }
        // a q-p correlated state uses the matrix route only
        let mut v = DMatrix::<f64>::identity(2, 2) * 1.5;
        v[(0, 1)] = 0.3;
        v[(1, 0)] = 0.3;
        assert!(!spectral::applies(&v));
        assert!(spectral::applies(&embed(1.0)));
    }

    #[test]
    fn near_pure_states_keep_precision() {
        // two slightly different weak thermal states: 1 - F ~ 1e-12
        let (n1, n2) = (1e-4, 1e-4 + 2e-8);
        let f = fidelity_zero_mean(&embed(n1), &embed(n2)).unwrap();
        // 1 - F for weak thermal states ≈ (√(n1) - √(n2))² / 2 to leading order
        let approx = 0.5 * (n1.sqrt() - n2.sqrt()).powi(2);
        assert!(
            ((1.0 - f) - approx).abs() < 0.01 * approx,
            "{} vs {approx}",
            1.0 - f
        );
    }
}
