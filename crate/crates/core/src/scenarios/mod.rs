//! Named scenario presets, the tau sweep driver and the report that ranks
//! each curve against the coherent benchmark.

mod report;
pub mod table;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channels::EnvironmentSpec;
use crate::error::{Error, Result};
use crate::gaussian::{check_physical, make_source, source_for_signal};
use crate::metrology::{qfi_coherent_analytic, qfi_numeric, BenchmarkParams};

pub use report::{ordering_report, CurveSummary, OrderingReport, TauRanking, COINCIDENCE_TOL};

/// Identifier of a built-in preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioName {
    PureLoss,
    ThermalLoss,
    CorrelatedSymmetric,
    CorrelatedAsymmetricNegative,
    CorrelatedAsymmetricPositive,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 5] = [
        ScenarioName::PureLoss,
        ScenarioName::ThermalLoss,
        ScenarioName::CorrelatedSymmetric,
        ScenarioName::CorrelatedAsymmetricNegative,
        ScenarioName::CorrelatedAsymmetricPositive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::PureLoss => "pure_loss",
            ScenarioName::ThermalLoss => "thermal_loss",
            ScenarioName::CorrelatedSymmetric => "correlated_symmetric",
            ScenarioName::CorrelatedAsymmetricNegative => "correlated_asymmetric_negative",
            ScenarioName::CorrelatedAsymmetricPositive => "correlated_asymmetric_positive",
        }
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<_> = ScenarioName::ALL.iter().map(|n| n.as_str()).collect();
                Error::domain(format!(
                    "unknown scenario '{s}' (expected one of {})",
                    known.join(", ")
                ))
            })
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Full parameter set of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPreset {
    pub name: String,
    /// Photons on the signal mode A.
    pub n_signal: f64,
    /// Photons of the faint thermal input.
    pub n_low: f64,
    pub env: EnvironmentSpec,
    pub eta_list: Vec<f64>,
    pub includes_single_thermal: bool,
    pub includes_coherent: bool,
}

pub const DEFAULT_ETAS: [f64; 3] = [0.5, 0.1, 0.01];

impl ScenarioPreset {
    /// Validates the environment (physical and separable) and the feasibility
    /// of every source in `eta_list`.
    pub fn new(
        name: impl Into<String>,
        n_signal: f64,
        n_low: f64,
        env: EnvironmentSpec,
        eta_list: Vec<f64>,
    ) -> Result<Self> {
        let preset = ScenarioPreset {
            name: name.into(),
            n_signal,
            n_low,
            env,
            eta_list,
            includes_single_thermal: true,
            includes_coherent: true,
        };
        preset.validate()?;
        Ok(preset)
    }

    fn validate(&self) -> Result<()> {
        let report = check_physical(&self.env.cov());
        if !report.separable() {
            return Err(Error::domain(format!(
                "scenario '{}': environment is entangled (nu_tilde^2 = {})",
                self.name, report.nu_tilde_sq
            )));
        }
        for &eta in self.eta_list.iter().chain(std::iter::once(&1.0)) {
            source_for_signal(self.n_signal, eta, self.n_low)?;
        }
        Ok(())
    }

    /// Curves in output order: sources in `eta_list` order, then the
    /// single-mode thermal baseline, then the coherent benchmark.
    pub fn curves(&self) -> Vec<Curve> {
        let mut curves: Vec<Curve> = self
            .eta_list
            .iter()
            .map(|&eta| Curve::Source { eta })
            .collect();
        if self.includes_single_thermal {
            curves.push(Curve::SingleThermal);
        }
        if self.includes_coherent {
            curves.push(Curve::Coherent);
        }
        curves
    }

    /// Coherent benchmark; the coherent probe only sees the mode-A bath.
    pub fn benchmark(&self, tau: f64) -> Result<f64> {
        qfi_coherent_analytic(&BenchmarkParams {
            n_bar: self.n_signal,
            tau,
            t0: self.env.t0(),
            omega: self.env.omega1(),
        })
    }

    /// QFI of one curve at one `tau`.
    pub fn qfi(&self, curve: Curve, tau: f64) -> Result<f64> {
        let eta = match curve {
            Curve::Coherent => return self.benchmark(tau),
            Curve::SingleThermal => 1.0,
            Curve::Source { eta } => eta,
        };
        let probe = make_source(&source_for_signal(self.n_signal, eta, self.n_low)?);
        Ok(qfi_numeric(&probe, &self.env, tau, None)?.h)
    }
}

/// Returns one of the five built-in presets.
pub fn preset(name: ScenarioName) -> ScenarioPreset {
    let etas = DEFAULT_ETAS.to_vec();
    let build = |n_signal, n_low, env: Result<EnvironmentSpec>| {
        ScenarioPreset::new(
            name.as_str(),
            n_signal,
            n_low,
            env.expect("preset environment"),
            etas.clone(),
        )
        .expect("preset parameters are valid")
    };
    match name {
        ScenarioName::PureLoss => build(10.0, 1e-4, EnvironmentSpec::thermal(0.7, 0.5)),
        ScenarioName::ThermalLoss => build(20.0, 0.12, EnvironmentSpec::thermal(0.4, 1.33 + 0.5)),
        ScenarioName::CorrelatedSymmetric => {
            let omega = 20.34 + 0.5;
            let g = 0.5 - omega;
            build(50.0, 8.3e-3, EnvironmentSpec::new(0.8, omega, omega, g, g))
        }
        ScenarioName::CorrelatedAsymmetricNegative | ScenarioName::CorrelatedAsymmetricPositive => {
            let (omega1, omega2) = (1.0 + 0.5, 100.0 + 0.5);
            let mut g = separable_boundary_correlation(omega1, omega2);
            if name == ScenarioName::CorrelatedAsymmetricNegative {
                g = -g;
            }
            build(
                50.0,
                8.3e-3,
                EnvironmentSpec::new(0.8, omega1, omega2, g, g),
            )
        }
    }
}

/// `√((2ω1 - 1)(2ω2 - 1)) / 2`: the magnitude of `g = g'` that keeps the
/// environment both physical and separable.
pub fn separable_boundary_correlation(omega1: f64, omega2: f64) -> f64 {
    ((2.0 * omega1 - 1.0) * (2.0 * omega2 - 1.0)).sqrt() / 2.0
}

/// Bose-Einstein occupation `1 / (exp(h f / k T) - 1)` of a mode at
/// frequency `freq_hz` and temperature `temp_k`.
pub fn thermal_occupation(freq_hz: f64, temp_k: f64) -> f64 {
    const PLANCK: f64 = 6.626_070_15e-34;
    const BOLTZMANN: f64 = 1.380_649e-23;
    1.0 / (PLANCK * freq_hz / (BOLTZMANN * temp_k)).exp_m1()
}

/// `{0.01, 0.02, ..., 0.99}`.
pub fn default_tau_grid() -> Vec<f64> {
    (1..=99).map(|i| i as f64 / 100.0).collect()
}

/// `steps` evenly spaced points from `min` to `max` inclusive.
pub fn tau_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::domain("grid needs at least one step"));
    }
    if !(min > 0.0 && max < 1.0 && min <= max) {
        return Err(Error::domain(format!(
            "grid must satisfy 0 < min <= max < 1, got [{min}, {max}]"
        )));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            let k = i as f64;
            (min * (last - k) + max * k) / last
        })
        .collect())
}

/// One curve of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    /// Correlated-thermal source with beam-splitter transmissivity `eta`.
    Source { eta: f64 },
    /// Single-mode thermal probe (the `eta = 1` source).
    SingleThermal,
    /// Analytic coherent-state benchmark.
    Coherent,
}

impl Curve {
    pub fn label(&self) -> &'static str {
        match self {
            Curve::Source { .. } => "source",
            Curve::SingleThermal => "single_thermal",
            Curve::Coherent => "coherent",
        }
    }

    /// Beam-splitter transmissivity; `None` for the coherent benchmark.
    pub fn eta(&self) -> Option<f64> {
        match *self {
            Curve::Source { eta } => Some(eta),
            Curve::SingleThermal => Some(1.0),
            Curve::Coherent => None,
        }
    }

    pub fn is_thermal(&self) -> bool {
        !matches!(self, Curve::Coherent)
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Curve::Source { eta } => write!(f, "source eta={eta}"),
            other => f.write_str(other.label()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scenario: String,
    pub curve: Curve,
    pub tau: f64,
    pub qfi: f64,
    pub qfi_benchmark: f64,
    pub beats_benchmark: bool,
    pub n_signal: f64,
    pub n_low: f64,
    pub t0: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub g: f64,
    pub gprime: f64,
}

impl SweepRow {
    pub fn eta(&self) -> Option<f64> {
        self.curve.eta()
    }
}

/// Evaluates every curve of `preset` on `tau_grid`.
///
/// Points are computed in parallel on the current rayon pool; rows come back
/// sorted by (curve, tau) regardless of scheduling.
pub fn sweep(preset: &ScenarioPreset, tau_grid: &[f64]) -> Result<Vec<SweepRow>> {
    if tau_grid.is_empty() {
        return Err(Error::domain("tau grid is empty"));
    }
    if let Some(&bad) = tau_grid.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::domain(format!("grid point tau={bad} outside (0,1)")));
    }
    if tau_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("tau grid must be strictly ascending"));
    }
    let curves = preset.curves();
    let points: Vec<(Curve, f64)> = curves
        .iter()
        .flat_map(|&c| tau_grid.iter().map(move |&t| (c, t)))
        .collect();
    let env = preset.env;
    points
        .par_iter()
        .map(|&(curve, tau)| {
            let at = |e: Error| Error::AtPoint {
                curve: curve.to_string(),
                tau,
                source: Box::new(e),
            };
            let qfi = preset.qfi(curve, tau).map_err(at)?;
            let qfi_benchmark = preset.benchmark(tau).map_err(at)?;
            Ok(SweepRow {
                scenario: preset.name.clone(),
                curve,
                tau,
                qfi,
                qfi_benchmark,
                beats_benchmark: curve.is_thermal() && qfi > qfi_benchmark,
                n_signal: preset.n_signal,
                n_low: preset.n_low,
                t0: env.t0(),
                omega1: env.omega1(),
                omega2: env.omega2(),
                g: env.g(),
                gprime: env.gprime(),
            })
        })
        .collect()
}
