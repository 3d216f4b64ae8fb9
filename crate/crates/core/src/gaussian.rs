//! Gaussian states in the covariance-matrix picture, the beam-splitter
//! building block, the correlated-thermal source and the two-mode
//! physicality / separability tests.
//!
//! Conventions: `[q, p] = i`, so the vacuum covariance is `I/2` and a thermal
//! state with `n` mean photons has covariance `(n + 1/2) I`. States are kept
//! in mode-major order `(q_1, p_1, q_2, p_2, ...)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{concat, congruence, direct_sum, max_asymmetry};

/// Maximum tolerated `|V_ij - V_ji|`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Slack on `nu >= 1/2` (and on `nu^2 >= 1/4` for the closed forms).
pub const PHYSICALITY_TOL: f64 = 1e-10;

/// Layout of the `2n` phase-space coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ordering {
    /// `(q_1, p_1, q_2, p_2, ...)`; the storage layout of [`GaussianState`].
    ModeMajor,
    /// `(q_1, q_2, ..., p_1, p_2, ...)`; the layout of the fidelity kernel.
    QuadratureMajor,
}

impl Ordering {
    /// Source index (in mode-major layout) of slot `k` in this layout.
    fn mode_major_index(self, k: usize, n_modes: usize) -> usize {
        match self {
            Ordering::ModeMajor => k,
            Ordering::QuadratureMajor => {
                if k < n_modes {
                    2 * k
                } else {
                    2 * (k - n_modes) + 1
                }
            }
        }
    }
}

impl FromStr for Ordering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mode-major" | "mode_major" | "qpqp" => Ok(Ordering::ModeMajor),
            "quadrature-major" | "quadrature_major" | "qqpp" => Ok(Ordering::QuadratureMajor),
            other => Err(Error::domain(format!("unknown ordering tag '{other}'"))),
        }
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ordering::ModeMajor => f.write_str("mode-major"),
            Ordering::QuadratureMajor => f.write_str("quadrature-major"),
        }
    }
}

fn permutation(from: Ordering, to: Ordering, n_modes: usize) -> Vec<usize> {
    // perm[k] = index in `from` layout feeding slot k of `to` layout
    let mut inv_from = vec![0; 2 * n_modes];
    for k in 0..2 * n_modes {
        inv_from[from.mode_major_index(k, n_modes)] = k;
    }
    (0..2 * n_modes)
        .map(|k| inv_from[to.mode_major_index(k, n_modes)])
        .collect()
}

/// Permutation-similarity transform of a covariance matrix between layouts.
pub fn reorder(cov: &DMatrix<f64>, from: Ordering, to: Ordering) -> Result<DMatrix<f64>> {
    let dim = cov.nrows();
    if cov.ncols() != dim || !dim.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "covariance must be square with even dimension, got {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    let perm = permutation(from, to, dim / 2);
    Ok(DMatrix::from_fn(dim, dim, |r, c| cov[(perm[r], perm[c])]))
}

/// Same permutation as [`reorder`], applied to a first-moment vector.
pub fn reorder_vector(v: &DVector<f64>, from: Ordering, to: Ordering) -> Result<DVector<f64>> {
    if !v.len().is_multiple_of(2) {
        return Err(Error::domain("mean vector must have even length"));
    }
    let perm = permutation(from, to, v.len() / 2);
    Ok(DVector::from_fn(v.len(), |k, _| v[perm[k]]))
}

/// The symplectic form for `n` modes in a chosen layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    omega: DMatrix<f64>,
    ordering: Ordering,
}

impl SymplecticForm {
    pub fn new(n_modes: usize, ordering: Ordering) -> Self {
        let mut qqpp = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for k in 0..n_modes {
            qqpp[(k, n_modes + k)] = 1.0;
            qqpp[(n_modes + k, k)] = -1.0;
        }
        let omega = reorder(&qqpp, Ordering::QuadratureMajor, ordering)
            .expect("symplectic form has even dimension");
        SymplecticForm { omega, ordering }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.omega
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    /// `|| S Ω S^T - Ω ||_max`.
    pub fn symplectic_defect(&self, s: &DMatrix<f64>) -> f64 {
        crate::linalg::max_abs(&(congruence(s, &self.omega) - &self.omega))
    }
}

/// A Gaussian state: first moments and covariance matrix, mode-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    n_modes: usize,
}

impl GaussianState {
    /// Validates shape, symmetry and the uncertainty principle.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = cov.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || cov.ncols() != dim {
            return Err(Error::domain(format!(
                "covariance must be 2n x 2n with n >= 1, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.len() != dim {
            return Err(Error::domain(format!(
                "mean has length {}, expected {dim}",
                mean.len()
            )));
        }
        if cov.iter().chain(mean.iter()).any(|x| !x.is_finite()) {
            return Err(Error::domain("state moments must be finite"));
        }
        let asym = max_asymmetry(&cov);
        if asym > SYMMETRY_TOL {
            return Err(Error::domain(format!(
                "covariance is not symmetric (max asymmetry {asym:e})"
            )));
        }
        let nus = symplectic_eigenvalues(&cov)?;
        if nus[0] < 0.5 - PHYSICALITY_TOL {
            return Err(Error::domain(format!(
                "covariance violates the uncertainty principle (smallest symplectic eigenvalue {})",
                nus[0]
            )));
        }
        Ok(GaussianState {
            mean,
            cov,
            n_modes: dim / 2,
        })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        GaussianState {
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes) * 0.5,
            n_modes,
        }
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Storage layout; always mode-major.
    pub fn ordering(&self) -> Ordering {
        Ordering::ModeMajor
    }

    /// Mean photon number of mode `k`: `(V_qq + V_pp + q̄² + p̄²)/2 - 1/2`.
    pub fn mean_photons(&self, k: usize) -> f64 {
        let (q, p) = (2 * k, 2 * k + 1);
        0.5 * (self.cov[(q, q)] + self.cov[(p, p)] + self.mean[q].powi(2) + self.mean[p].powi(2))
            - 0.5
    }

    /// `self ⊗ other`, with `other`'s modes appended.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        GaussianState {
            mean: concat(&self.mean, &other.mean),
            cov: direct_sum(&self.cov, &other.cov),
            n_modes: self.n_modes + other.n_modes,
        }
    }

    /// Action of a symplectic (Gaussian unitary) map: `x -> S x`, `V -> S V S^T`.
    pub fn transform(&self, s: &DMatrix<f64>) -> GaussianState {
        let mut cov = congruence(s, &self.cov);
        cov = (&cov + cov.transpose()) * 0.5;
        GaussianState {
            mean: s * &self.mean,
            cov,
            n_modes: self.n_modes,
        }
    }

    /// Marginal on the listed modes, in the order given.
    pub fn select_modes(&self, modes: &[usize]) -> Result<GaussianState> {
        if let Some(&bad) = modes.iter().find(|&&k| k >= self.n_modes) {
            return Err(Error::domain(format!(
                "mode index {bad} out of range for a {}-mode state",
                self.n_modes
            )));
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        let dim = idx.len();
        Ok(GaussianState {
            mean: DVector::from_fn(dim, |r, _| self.mean[idx[r]]),
            cov: DMatrix::from_fn(dim, dim, |r, c| self.cov[(idx[r], idx[c])]),
            n_modes: modes.len(),
        })
    }

    /// Covariance in quadrature-major layout.
    pub fn cov_quadrature_major(&self) -> DMatrix<f64> {
        reorder(&self.cov, Ordering::ModeMajor, Ordering::QuadratureMajor)
            .expect("state covariance has even dimension")
    }

    pub fn mean_quadrature_major(&self) -> DVector<f64> {
        reorder_vector(&self.mean, Ordering::ModeMajor, Ordering::QuadratureMajor)
            .expect("state mean has even length")
    }

    /// Reads the `(a, b, c1, c2)` block form of a two-mode covariance.
    pub fn two_mode_block(&self) -> Result<TwoModeCov> {
        if self.n_modes != 2 {
            return Err(Error::domain(format!(
                "expected a two-mode state, got {} modes",
                self.n_modes
            )));
        }
        let block = TwoModeCov {
            a: self.cov[(0, 0)],
            b: self.cov[(2, 2)],
            c1: self.cov[(0, 2)],
            c2: self.cov[(1, 3)],
        };
        let expected = block.to_cov();
        let dev = crate::linalg::max_abs(&(&expected - &self.cov));
        let scale = crate::linalg::max_abs(&self.cov).max(1.0);
        if dev > 1e-12 * scale {
            return Err(Error::domain(format!(
                "covariance is not of the block form diag(a,a,b,b) + (c1,c2) (deviation {dev:e})"
            )));
        }
        Ok(block)
    }
}

fn check_photons(n_bar: f64, what: &str) -> Result<()> {
    if !(n_bar.is_finite() && n_bar >= 0.0) {
        return Err(Error::domain(format!(
            "{what} must be a finite mean photon number >= 0, got {n_bar}"
        )));
    }
    Ok(())
}

/// Single-mode thermal state, covariance `(n_bar + 1/2) I`.
pub fn thermal_state(n_bar: f64) -> Result<GaussianState> {
    check_photons(n_bar, "n_bar")?;
    Ok(GaussianState {
        mean: DVector::zeros(2),
        cov: DMatrix::identity(2, 2) * (n_bar + 0.5),
        n_modes: 1,
    })
}

/// Coherent state `|alpha>` with `|alpha|^2 = n_bar` and `arg(alpha) = phase`.
///
/// The mean is `(q̄, p̄) = sqrt(2 n_bar) (cos phase, sin phase)`.
pub fn coherent_state(n_bar: f64, phase: f64) -> Result<GaussianState> {
    check_photons(n_bar, "n_bar")?;
    if !phase.is_finite() {
        return Err(Error::domain("phase must be finite"));
    }
    let r = (2.0 * n_bar).sqrt();
    let (s, c) = phase.sin_cos();
    Ok(GaussianState {
        mean: DVector::from_vec(vec![r * c, r * s]),
        cov: DMatrix::identity(2, 2) * 0.5,
        n_modes: 1,
    })
}

/// Two-mode beam splitter of transmissivity `eta`, mode-major:
/// `[[√η I, √(1-η) I], [-√(1-η) I, √η I]]`.
pub fn beam_splitter(eta: f64) -> Result<DMatrix<f64>> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain(format!("eta must lie in [0,1], got {eta}")));
    }
    let t = eta.sqrt();
    let r = (1.0 - eta).sqrt();
    #[rustfmt::skip]
    let s = DMatrix::from_row_slice(4, 4, &[
         t, 0.0,   r, 0.0,
       0.0,   t, 0.0,   r,
        -r, 0.0,   t, 0.0,
       0.0,  -r, 0.0,   t,
    ]);
    Ok(s)
}

/// Covariance of the block form `[[a I, C], [C, b I]]`, `C = diag(c1, c2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCov {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
}

impl TwoModeCov {
    pub fn new(a: f64, b: f64, c1: f64, c2: f64) -> Self {
        TwoModeCov { a, b, c1, c2 }
    }

    /// Full 4x4 covariance, mode-major.
    pub fn to_cov(&self) -> DMatrix<f64> {
        let TwoModeCov { a, b, c1, c2 } = *self;
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(4, 4, &[
            a,  0.0, c1,  0.0,
            0.0, a,  0.0, c2,
            c1, 0.0, b,   0.0,
            0.0, c2, 0.0, b,
        ]);
        m
    }

    pub fn det(&self) -> f64 {
        (self.a * self.b - self.c1 * self.c1) * (self.a * self.b - self.c2 * self.c2)
    }

    /// Seralian-type invariant `a² + b² + 2 c1 c2`.
    pub fn delta(&self) -> f64 {
        self.a * self.a + self.b * self.b + 2.0 * self.c1 * self.c2
    }

    /// Same invariant for the partial transpose, `a² + b² - 2 c1 c2`.
    pub fn delta_pt(&self) -> f64 {
        self.a * self.a + self.b * self.b - 2.0 * self.c1 * self.c2
    }

    /// Squared smaller symplectic eigenvalue, `(Δ - √(Δ² - 4 det))/2`.
    pub fn nu_minus_sq(&self) -> f64 {
        smaller_root(self.delta(), self.det())
    }

    /// Squared smaller symplectic eigenvalue of the partial transpose.
    pub fn nu_tilde_minus_sq(&self) -> f64 {
        smaller_root(self.delta_pt(), self.det())
    }
}

// Smaller root of x² - Δx + D = 0; the rationalised form avoids cancellation
// when Δ² ≫ 4D.
fn smaller_root(delta: f64, det: f64) -> f64 {
    let disc = (delta * delta - 4.0 * det).max(0.0).sqrt();
    if det > 0.0 && delta > 0.0 {
        2.0 * det / (delta + disc)
    } else {
        (delta - disc) / 2.0
    }
}

/// Correlated-thermal source: thermal states `n_high`, `n_low` mixed on a
/// beam splitter of transmissivity `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    eta: f64,
    n_high: f64,
    n_low: f64,
}

impl SourceSpec {
    pub fn new(eta: f64, n_high: f64, n_low: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::domain(format!("eta must lie in (0,1], got {eta}")));
        }
        check_photons(n_low, "n_low")?;
        check_photons(n_high, "n_high")?;
        if n_high < n_low {
            return Err(Error::domain(format!(
                "n_high ({n_high}) must be >= n_low ({n_low})"
            )));
        }
        Ok(SourceSpec { eta, n_high, n_low })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn n_high(&self) -> f64 {
        self.n_high
    }

    pub fn n_low(&self) -> f64 {
        self.n_low
    }

    /// Photons on the signal mode A, `η n_H + (1-η) n_L`.
    pub fn n_signal(&self) -> f64 {
        self.eta * self.n_high + (1.0 - self.eta) * self.n_low
    }

    /// Closed-form `(a, b, c)` of the output covariance.
    pub fn moments(&self) -> TwoModeCov {
        let mu_h = self.n_high + 0.5;
        let mu_l = self.n_low + 0.5;
        let eta = self.eta;
        let a = eta * mu_h + (1.0 - eta) * mu_l;
        let b = eta * mu_l + (1.0 - eta) * mu_h;
        let c = (eta * (1.0 - eta)).sqrt() * (mu_l - mu_h);
        TwoModeCov::new(a, b, c, c)
    }
}

/// Builds the zero-mean two-mode correlated-thermal state.
pub fn make_source(spec: &SourceSpec) -> GaussianState {
    GaussianState {
        mean: DVector::zeros(4),
        cov: spec.moments().to_cov(),
        n_modes: 2,
    }
}

/// Chooses `n_high` so that mode A carries `n_signal` photons.
pub fn source_for_signal(n_signal: f64, eta: f64, n_low: f64) -> Result<SourceSpec> {
    check_photons(n_signal, "n_signal")?;
    check_photons(n_low, "n_low")?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::domain(format!("eta must lie in (0,1], got {eta}")));
    }
    let n_high = (n_signal - (1.0 - eta) * n_low) / eta;
    if n_high < n_low {
        return Err(Error::domain(format!(
            "infeasible source: n_signal={n_signal} with eta={eta} requires n_high={n_high} < n_low={n_low}"
        )));
    }
    SourceSpec::new(eta, n_high, n_low)
}

/// Symplectic spectrum (ascending) of a mode-major covariance: the moduli of
/// the eigenvalues of `iΩV`, which come in `±ν` pairs.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = cov.nrows();
    if dim == 0 || !dim.is_multiple_of(2) || cov.ncols() != dim {
        return Err(Error::domain("covariance must be 2n x 2n"));
    }
    let asym = max_asymmetry(cov);
    if asym > SYMMETRY_TOL {
        return Err(Error::domain(format!(
            "covariance is not symmetric (max asymmetry {asym:e})"
        )));
    }
    let omega = SymplecticForm::new(dim / 2, Ordering::ModeMajor);
    let m = omega.matrix() * cov;
    let mut moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|x, y| x.total_cmp(y));
    Ok(moduli.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

/// Outcome of the two-mode physicality test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalityReport {
    /// `|c1| < √(ab)`.
    pub qq_bound: bool,
    /// `|c2| < √(ab)`.
    pub pp_bound: bool,
    pub nu_sq: f64,
    /// `ν² >= 1/4` up to [`PHYSICALITY_TOL`].
    pub nu_bound: bool,
    pub nu_tilde_sq: f64,
}

impl PhysicalityReport {
    pub fn physical(&self) -> bool {
        self.qq_bound && self.pp_bound && self.nu_bound
    }

    pub fn separable(&self) -> bool {
        self.nu_tilde_sq >= 0.25 - PHYSICALITY_TOL
    }
}

/// Physicality of a block-form covariance `(ω1, ω2, g, g')`.
pub fn check_physical(cov: &TwoModeCov) -> PhysicalityReport {
    let bound = (cov.a * cov.b).max(0.0).sqrt();
    let nu_sq = cov.nu_minus_sq();
    PhysicalityReport {
        qq_bound: cov.c1.abs() < bound,
        pp_bound: cov.c2.abs() < bound,
        nu_sq,
        nu_bound: nu_sq >= 0.25 - PHYSICALITY_TOL,
        nu_tilde_sq: cov.nu_tilde_minus_sq(),
    }
}

/// PPT separability of a physical block-form covariance.
pub fn check_separable(cov: &TwoModeCov) -> Result<bool> {
    let report = check_physical(cov);
    if !report.physical() {
        return Err(Error::domain(format!(
            "separability is undefined for an unphysical covariance (nu^2 = {})",
            report.nu_sq
        )));
    }
    Ok(report.separable())
}
