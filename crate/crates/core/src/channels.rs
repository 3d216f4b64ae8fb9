//! The unknown lossy channel followed by joint Gaussian decoherence.
//!
//! Mode A passes through a beam splitter of transmissivity `tau` (vacuum in
//! the other port), then both A and B meet environment modes E1, E2 on beam
//! splitters of transmissivity `t0`. The environment pair is a zero-mean
//! Gaussian state with covariance `[[ω1 I, G], [G, ω2 I]]`, `G = diag(g, g')`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::{beam_splitter, check_physical, GaussianState, TwoModeCov};
use crate::linalg::embed_two_mode;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentSpec {
    t0: f64,
    omega1: f64,
    omega2: f64,
    g: f64,
    gprime: f64,
}

impl EnvironmentSpec {
    pub fn new(t0: f64, omega1: f64, omega2: f64, g: f64, gprime: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0 <= 1.0) {
            return Err(Error::domain(format!("t0 must lie in (0,1], got {t0}")));
        }
        for (name, w) in [("omega1", omega1), ("omega2", omega2)] {
            if !(w.is_finite() && w >= 0.5) {
                return Err(Error::domain(format!("{name} must be >= 1/2, got {w}")));
            }
        }
        if !(g.is_finite() && gprime.is_finite()) {
            return Err(Error::domain("environment correlations must be finite"));
        }
        let report = check_physical(&TwoModeCov::new(omega1, omega2, g, gprime));
        if !report.physical() {
            return Err(Error::domain(format!(
                "environment covariance is unphysical (|g| < sqrt(omega1*omega2): {}, \
                 |g'| < sqrt(omega1*omega2): {}, nu^2 = {} >= 1/4: {})",
                report.qq_bound, report.pp_bound, report.nu_sq, report.nu_bound
            )));
        }
        Ok(EnvironmentSpec {
            t0,
            omega1,
            omega2,
            g,
            gprime,
        })
    }

    /// Independent thermal baths of equal variance on both modes.
    pub fn thermal(t0: f64, omega: f64) -> Result<Self> {
        Self::new(t0, omega, omega, 0.0, 0.0)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn gprime(&self) -> f64 {
        self.gprime
    }

    pub fn cov(&self) -> TwoModeCov {
        TwoModeCov::new(self.omega1, self.omega2, self.g, self.gprime)
    }

    pub fn state(&self) -> GaussianState {
        GaussianState::new(DVector::zeros(4), self.cov().to_cov())
            .expect("environment validated at construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    tau: f64,
    env: EnvironmentSpec,
}

impl ChannelParams {
    pub fn new(tau: f64, env: EnvironmentSpec) -> Result<Self> {
        check_tau(tau)?;
        Ok(ChannelParams { tau, env })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn env(&self) -> &EnvironmentSpec {
        &self.env
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::domain(format!("tau must lie in [0,1], got {tau}")));
    }
    Ok(())
}

/// Closed-form output of a two-mode block-form probe.
///
/// `ã = T0 τ a + T0 (1-τ)/2 + (1-T0) ω1`, `b̃ = T0 b + (1-T0) ω2`,
/// `c_k = T0 √τ c_k + (1-T0) g_k`. Means scale by `√(T0 τ)` on A and `√T0`
/// on B.
pub fn evolve_source(source: &GaussianState, params: &ChannelParams) -> Result<GaussianState> {
    let block = source.two_mode_block()?;
    let ChannelParams { tau, env } = *params;
    let t0 = env.t0;
    let sqrt_tau = tau.sqrt();
    let out = TwoModeCov {
        a: t0 * tau * block.a + t0 * (1.0 - tau) / 2.0 + (1.0 - t0) * env.omega1,
        b: t0 * block.b + (1.0 - t0) * env.omega2,
        c1: t0 * sqrt_tau * block.c1 + (1.0 - t0) * env.g,
        c2: t0 * sqrt_tau * block.c2 + (1.0 - t0) * env.gprime,
    };
    let m = source.mean();
    let ka = (t0 * tau).sqrt();
    let kb = t0.sqrt();
    let mean = DVector::from_vec(vec![ka * m[0], ka * m[1], kb * m[2], kb * m[3]]);
    GaussianState::new(mean, out.to_cov())
}

/// Single-mode version: loss `tau`, then a thermal-loss channel `(t0, omega)`.
/// Output covariance `T0 τ V + (T0 (1-τ)/2 + (1-T0) ω) I`, mean `√(T0 τ) x̄`.
pub fn evolve_single_mode(
    probe: &GaussianState,
    tau: f64,
    t0: f64,
    omega: f64,
) -> Result<GaussianState> {
    if probe.n_modes() != 1 {
        return Err(Error::domain(format!(
            "expected a single-mode probe, got {} modes",
            probe.n_modes()
        )));
    }
    check_tau(tau)?;
    if !(t0 > 0.0 && t0 <= 1.0) {
        return Err(Error::domain(format!("t0 must lie in (0,1], got {t0}")));
    }
    if !(omega.is_finite() && omega >= 0.5) {
        return Err(Error::domain(format!("omega must be >= 1/2, got {omega}")));
    }
    let gain = t0 * tau;
    let noise = t0 * (1.0 - tau) / 2.0 + (1.0 - t0) * omega;
    let cov = probe.cov() * gain + DMatrix::identity(2, 2) * noise;
    GaussianState::new(probe.mean() * gain.sqrt(), cov)
}

/// Coherent probe through the single-mode channel; covariance `a' I` with
/// `a' = T0/2 + (1-T0) ω`.
pub fn evolve_coherent(n_bar: f64, tau: f64, t0: f64, omega: f64) -> Result<GaussianState> {
    let probe = crate::gaussian::coherent_state(n_bar, 0.0)?;
    evolve_single_mode(&probe, tau, t0, omega)
}

/// Reference evolution by explicit unitary dilation.
///
/// Modes are `(A, B, V, E1, E2)`: V is the vacuum port of the unknown loss and
/// E1, E2 carry the (mixed) environment state. The three beam splitters act as
/// 10x10 symplectics; the ancillas are traced out afterwards.
pub fn evolve_dilation_oracle(
    source: &GaussianState,
    params: &ChannelParams,
) -> Result<GaussianState> {
    if source.n_modes() != 2 {
        return Err(Error::domain(format!(
            "expected a two-mode probe, got {} modes",
            source.n_modes()
        )));
    }
    let env = params.env();
    let joint = source
        .tensor(&GaussianState::vacuum(1))
        .tensor(&env.state());
    let loss = embed_two_mode(5, 0, 2, &beam_splitter(params.tau())?);
    let deco_a = embed_two_mode(5, 0, 3, &beam_splitter(env.t0())?);
    let deco_b = embed_two_mode(5, 1, 4, &beam_splitter(env.t0())?);
    let total = deco_b * deco_a * loss;
    let out = joint.transform(&total).select_modes(&[0, 1])?;
    GaussianState::new(out.mean().clone(), out.cov().clone())
}

/// Single-mode marginal of mode `mode_index`.
pub fn reduced_state(state: &GaussianState, mode_index: usize) -> Result<GaussianState> {
    state.select_modes(&[mode_index])
}
