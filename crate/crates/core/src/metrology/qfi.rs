//! QFI from the fidelity between outputs at `tau` and `tau + dtau`,
//! `H = 8 (1 - F) / dtau²`, plus the analytic coherent benchmark and the
//! quantum Cramér-Rao bound.

use crate::channels::{evolve_single_mode, evolve_source, ChannelParams, EnvironmentSpec};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;

use super::fidelity::log_fidelity;

/// Finite-difference step schedule for [`qfi_numeric_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// First step tried.
    pub initial: f64,
    /// Halving stops before the step would drop below this.
    pub floor: f64,
    /// Convergence target on `|H(h) - H(h/2)| / H(h/2)`.
    pub rel_tol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            initial: 1e-4,
            floor: 1e-6,
            rel_tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiResult {
    pub tau: f64,
    /// QFI in units of `1/tau²`.
    pub h: f64,
    /// Step that produced `h`.
    pub dtau: f64,
    pub converged: bool,
    /// Relative change of `H` over the last halving (infinite if only one
    /// step was evaluated).
    pub relative_step_change: f64,
}

/// Parameters of the analytic coherent-probe benchmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkParams {
    pub n_bar: f64,
    pub tau: f64,
    pub t0: f64,
    pub omega: f64,
}

/// Decoherence factor `T0 / (T0 + 2 (1 - T0) ω)`.
pub fn gamma_dec(t0: f64, omega: f64) -> f64 {
    t0 / (t0 + 2.0 * (1.0 - t0) * omega)
}

/// `H_coh = γ_dec n̄ / τ`.
pub fn qfi_coherent_analytic(p: &BenchmarkParams) -> Result<f64> {
    if !(p.tau > 0.0) {
        return Err(Error::domain(format!(
            "tau must be > 0 for the coherent benchmark, got {}",
            p.tau
        )));
    }
    if !(p.t0 > 0.0 && p.t0 <= 1.0) {
        return Err(Error::domain(format!("t0 must lie in (0,1], got {}", p.t0)));
    }
    if !(p.omega >= 0.5) {
        return Err(Error::domain(format!(
            "omega must be >= 1/2, got {}",
            p.omega
        )));
    }
    if !(p.n_bar >= 0.0) {
        return Err(Error::domain(format!(
            "n_bar must be >= 0, got {}",
            p.n_bar
        )));
    }
    Ok(gamma_dec(p.t0, p.omega) * p.n_bar / p.tau)
}

/// Minimal error variance `1 / (N H)` allowed by the quantum Cramér-Rao bound.
pub fn qcr_error_bound(h: f64, n_probes: u64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain(format!("QFI must be > 0, got {h}")));
    }
    if n_probes == 0 {
        return Err(Error::domain("number of probes must be >= 1"));
    }
    Ok(1.0 / (n_probes as f64 * h))
}

fn evolve(probe: &GaussianState, env: &EnvironmentSpec, tau: f64) -> Result<GaussianState> {
    match probe.n_modes() {
        // a single-mode probe sees only the A-side decoherence
        1 => evolve_single_mode(probe, tau, env.t0(), env.omega1()),
        2 => evolve_source(probe, &ChannelParams::new(tau, *env)?),
        n => Err(Error::domain(format!(
            "probe must have one or two modes, got {n}"
        ))),
    }
}

/// `8 (1 - F(τ, τ+h)) / h²` with `1 - F` formed as `-expm1(ln F)`.
fn finite_difference(
    probe: &GaussianState,
    env: &EnvironmentSpec,
    base: &GaussianState,
    tau: f64,
    h: f64,
) -> Result<f64> {
    let shifted = evolve(probe, env, tau + h)?;
    let infidelity = -log_fidelity(base, &shifted)?.exp_m1();
    Ok((8.0 * infidelity / (h * h)).max(0.0))
}

/// QFI with the default step schedule; `dtau` overrides the initial step.
pub fn qfi_numeric(
    probe: &GaussianState,
    env: &EnvironmentSpec,
    tau: f64,
    dtau: Option<f64>,
) -> Result<QfiResult> {
    let mut control = StepControl::default();
    if let Some(h) = dtau {
        control.initial = h;
    }
    qfi_numeric_with(probe, env, tau, &control)
}

/// QFI by forward differences with step halving.
///
/// Starting from `control.initial` (shrunk to `1 - tau` if needed), the step
/// is halved until two successive estimates agree to `control.rel_tol` or the
/// next step would fall below `control.floor`. The last estimate is returned.
pub fn qfi_numeric_with(
    probe: &GaussianState,
    env: &EnvironmentSpec,
    tau: f64,
    control: &StepControl,
) -> Result<QfiResult> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain(format!(
            "tau must lie in the open interval (0,1) for the QFI, got {tau}"
        )));
    }
    if !(control.initial > 0.0 && control.floor > 0.0 && control.rel_tol > 0.0) {
        return Err(Error::domain("step control values must be positive"));
    }
    let base = evolve(probe, env, tau)?;
    let mut h = control.initial.min(1.0 - tau);
    let mut estimate = finite_difference(probe, env, &base, tau, h)?;
    let mut change = f64::INFINITY;
    let mut converged = false;
    while h / 2.0 >= control.floor {
        let half = h / 2.0;
        let next = finite_difference(probe, env, &base, tau, half)?;
        change = if next == estimate {
            0.0
        } else {
            (next - estimate).abs() / next.abs().max(f64::MIN_POSITIVE)
        };
        h = half;
        estimate = next;
        if change < control.rel_tol {
            converged = true;
            break;
        }
    }
    Ok(QfiResult {
        tau,
        h: estimate,
        dtau: h,
        converged,
        relative_step_change: change,
    })
}
