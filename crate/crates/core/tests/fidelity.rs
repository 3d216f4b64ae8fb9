mod common;

use corrtherm_core::{
    fidelity_general, fidelity_zero_mean, fidelity_zero_mean_matrix, log_fidelity,
    matrix_sqrt_denman_beavers, matrix_sqrt_principal, reorder, thermal_state, GaussianState,
    Ordering, TwoModeCov,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn qmajor(v: &DMatrix<f64>) -> DMatrix<f64> {
    reorder(v, Ordering::ModeMajor, Ordering::QuadratureMajor).unwrap()
}

#[test]
fn general_states_bounds_and_symmetry() {
    let mut rng = common::rng(21);
    for n in 1..=3 {
        for _ in 0..40 {
            let a = common::random_state(&mut rng, n);
            let b = common::random_state(&mut rng, n);
            let fab = fidelity_general(&a, &b).unwrap();
            let fba = fidelity_general(&b, &a).unwrap();
            assert!((0.0..=1.0).contains(&fab));
            assert!((fab - fba).abs() < 1e-10, "n={n}: {fab} vs {fba}");
            assert!((fidelity_general(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn product_states_factorise() {
    let mut rng = common::rng(5);
    for _ in 0..30 {
        let (a1, a2) = (
            common::random_state(&mut rng, 1),
            common::random_state(&mut rng, 1),
        );
        let (b1, b2) = (
            common::random_state(&mut rng, 1),
            common::random_state(&mut rng, 1),
        );
        let joint = log_fidelity(&a1.tensor(&a2), &b1.tensor(&b2)).unwrap();
        let split = log_fidelity(&a1, &b1).unwrap() + log_fidelity(&a2, &b2).unwrap();
        assert!((joint - split).abs() < 1e-9 * (1.0 + split.abs()));
    }
}

#[test]
fn matrix_and_spectral_routes_agree_on_block_states() {
    let mut rng = common::rng(8);
    for _ in 0..100 {
        let a = common::random_source(&mut rng);
        let params = common::random_params(&mut rng);
        let b = corrtherm_core::evolve_source(&a, &params).unwrap();
        let (va, vb) = (a.cov_quadrature_major(), b.cov_quadrature_major());
        let fs = fidelity_zero_mean(&va, &vb).unwrap();
        let fm = fidelity_zero_mean_matrix(&va, &vb).unwrap();
        assert!((fs - fm).abs() < 1e-9, "{fs} vs {fm}");
    }
}

#[test]
fn unitary_invariance() {
    let mut rng = common::rng(13);
    for _ in 0..30 {
        let a = common::random_state(&mut rng, 2);
        let b = common::random_state(&mut rng, 2);
        let s = common::random_symplectic(&mut rng, 2, 0.4);
        let f = fidelity_general(&a, &b).unwrap();
        let g = fidelity_general(&a.transform(&s), &b.transform(&s)).unwrap();
        assert!((f - g).abs() < 1e-8, "{f} vs {g}");
    }
}

#[test]
fn thermal_oracle_on_a_grid() {
    let ns = [0.0, 1e-4, 0.3, 1.0, 2.5, 10.0, 40.0];
    for &n1 in &ns {
        for &n2 in &ns {
            let f =
                fidelity_general(&thermal_state(n1).unwrap(), &thermal_state(n2).unwrap()).unwrap();
            assert!(
                (f - common::thermal_fidelity_oracle(n1, n2)).abs() < 1e-10,
                "{n1} {n2}"
            );
        }
    }
}

#[test]
fn rejects_bad_inputs() {
    let vac = GaussianState::vacuum(1).cov_quadrature_major();
    assert!(fidelity_zero_mean(&vac, &GaussianState::vacuum(2).cov_quadrature_major()).is_err());
    let squeezed_too_far = DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.0, 0.1]);
    assert!(fidelity_zero_mean(&vac, &squeezed_too_far).is_err());
    let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.1, 1.0]);
    assert!(fidelity_zero_mean(&vac, &asym).is_err());
}

#[test]
fn sqrt_routes_agree() {
    let mut rng = common::rng(17);
    for _ in 0..50 {
        let v = common::random_cov(&mut rng, 2, 4.0, 0.5);
        let w = common::random_cov(&mut rng, 2, 4.0, 0.5);
        // non-symmetric with positive spectrum
        let m = &v * &w;
        let a = matrix_sqrt_principal(&m).unwrap();
        let b = matrix_sqrt_denman_beavers(&m).unwrap();
        let scale = m.amax();
        assert!((&a * &a - &m).amax() < 1e-10 * scale);
        assert!((&a - &b).amax() < 1e-8 * a.amax());
    }
}

proptest! {
    #[test]
    fn block_covariance_fidelity_in_unit_interval(
        a in 0.5f64..30.0, b in 0.5f64..30.0, s in -0.99f64..0.99,
        a2 in 0.5f64..30.0, b2 in 0.5f64..30.0, s2 in -0.99f64..0.99,
    ) {
        let c = s * ((a - 0.5) * (b - 0.5)).sqrt();
        let c2 = s2 * ((a2 - 0.5) * (b2 - 0.5)).sqrt();
        let v1 = qmajor(&TwoModeCov::new(a, b, c, c).to_cov());
        let v2 = qmajor(&TwoModeCov::new(a2, b2, c2, c2).to_cov());
        let f = fidelity_zero_mean(&v1, &v2).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        let g = fidelity_zero_mean(&v2, &v1).unwrap();
        prop_assert!((f - g).abs() < 1e-10);
    }
}
