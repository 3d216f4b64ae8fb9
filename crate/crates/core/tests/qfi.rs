use corrtherm_core::scenarios::table::write_csv;
use corrtherm_core::{
    coherent_state, default_tau_grid, make_source, preset, qcr_error_bound, qfi_coherent_analytic,
    qfi_numeric, qfi_numeric_with, source_for_signal, sweep, thermal_state, BenchmarkParams,
    EnvironmentSpec, ScenarioName, StepControl,
};

#[test]
fn coherent_numeric_matches_analytic_on_27_points() {
    for t0 in [0.4, 0.7, 1.0] {
        for omega in [0.5, 1.83, 20.84] {
            let env = EnvironmentSpec::thermal(t0, omega).unwrap();
            for tau in [0.1, 0.5, 0.9] {
                let probe = coherent_state(10.0, 0.0).unwrap();
                let h = qfi_numeric(&probe, &env, tau, None).unwrap().h;
                let exact = qfi_coherent_analytic(&BenchmarkParams {
                    n_bar: 10.0,
                    tau,
                    t0,
                    omega,
                })
                .unwrap();
                assert!(
                    (h - exact).abs() < 1e-4 * exact,
                    "{t0} {omega} {tau}: {h} vs {exact}"
                );
            }
        }
    }
}

#[test]
fn coherent_phase_does_not_matter() {
    let env = EnvironmentSpec::thermal(0.7, 1.83).unwrap();
    for tau in [0.05, 0.3, 0.8] {
        let h0 = qfi_numeric(&coherent_state(10.0, 0.0).unwrap(), &env, tau, None)
            .unwrap()
            .h;
        for phase in [0.3, 1.0, 2.2, -2.9] {
            let h = qfi_numeric(&coherent_state(10.0, phase).unwrap(), &env, tau, None)
                .unwrap()
                .h;
            assert!((h - h0).abs() < 1e-10 * h0, "phase {phase}: {h} vs {h0}");
        }
    }
}

#[test]
fn step_robust_on_every_preset() {
    for name in ScenarioName::ALL {
        let p = preset(name);
        for &eta in p.eta_list.iter().chain([1.0].iter()) {
            let probe = make_source(&source_for_signal(p.n_signal, eta, p.n_low).unwrap());
            for tau in default_tau_grid() {
                let coarse = qfi_numeric(&probe, &p.env, tau, Some(1e-3)).unwrap().h;
                let fine = qfi_numeric(&probe, &p.env, tau, Some(1e-4)).unwrap().h;
                assert!(
                    (coarse - fine).abs() < 1e-4 * fine,
                    "{name} eta={eta} tau={tau}: {coarse} vs {fine}"
                );
            }
        }
    }
}

#[test]
fn thermal_probe_below_benchmark() {
    let env = EnvironmentSpec::thermal(0.7, 0.5).unwrap();
    let h = qfi_numeric(&thermal_state(10.0).unwrap(), &env, 0.5, None)
        .unwrap()
        .h;
    assert!(h > 0.0 && h < 14.0);
    // the eta = 1 source with a vacuum idler is the same probe
    let fixed = StepControl {
        initial: 1e-4,
        floor: 1e-4,
        rel_tol: 1e-5,
    };
    let single = qfi_numeric_with(&thermal_state(10.0).unwrap(), &env, 0.5, &fixed).unwrap();
    let two_mode = make_source(&source_for_signal(10.0, 1.0, 0.0).unwrap());
    let pair = qfi_numeric_with(&two_mode, &env, 0.5, &fixed).unwrap();
    assert_eq!(single.dtau, pair.dtau);
    assert!(
        (single.h - pair.h).abs() < 1e-9 * single.h,
        "{} vs {}",
        single.h,
        pair.h
    );
}

#[test]
fn endpoints_and_bad_steps_rejected() {
    let env = EnvironmentSpec::thermal(0.7, 0.5).unwrap();
    let probe = coherent_state(10.0, 0.0).unwrap();
    assert!(qfi_numeric(&probe, &env, 0.0, None).is_err());
    assert!(qfi_numeric(&probe, &env, 1.0, None).is_err());
    assert!(qfi_numeric(&probe, &env, -0.2, None).is_err());
    assert!(qfi_numeric(&probe, &env, 0.5, Some(-1e-3)).is_err());
    // step shrinks next to tau = 1
    let r = qfi_numeric(&probe, &env, 0.99995, None).unwrap();
    assert!(r.dtau <= 5e-5);
    assert!((r.h - 7.0 / 0.99995).abs() < 1e-3);
}

#[test]
fn qcr_bound() {
    assert_eq!(qcr_error_bound(14.0, 1).unwrap(), 1.0 / 14.0);
    assert!((qcr_error_bound(14.0, 1000).unwrap() - 1.0 / 14000.0).abs() < 1e-18);
    assert!(qcr_error_bound(0.0, 10).is_err());
    assert!(qcr_error_bound(1.0, 0).is_err());
}

#[test]
fn sweeps_are_bitwise_deterministic() {
    let p = preset(ScenarioName::ThermalLoss);
    let grid = default_tau_grid();
    let csv = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let rows = pool.install(|| sweep(&p, &grid)).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        (rows, buf)
    };
    let (r1, a) = csv(1);
    let (r2, b) = csv(4);
    let (_, c) = csv(4);
    assert_eq!(a, b);
    assert_eq!(b, c);
    for (x, y) in r1.iter().zip(&r2) {
        assert_eq!(x.qfi.to_bits(), y.qfi.to_bits());
    }
}
