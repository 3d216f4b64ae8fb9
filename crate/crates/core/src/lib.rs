//! Quantum Fisher information for loss estimation with correlated-thermal
//! Gaussian probes.
//!
//! States are carried as [`GaussianState`] values in the shot-noise-1/2
//! convention (`[q, p] = i`, vacuum covariance `I/2`), stored in mode-major
//! order `(q_A, p_A, q_B, p_B, ...)`. The pipeline is:
//!
//! 1. build a probe ([`make_source`], [`coherent_state`], [`thermal_state`]),
//! 2. send it through the unknown loss `tau` followed by the joint Gaussian
//!    decoherence channel ([`evolve_source`], [`evolve_coherent`]),
//! 3. extract the QFI from the fidelity between neighbouring outputs
//!    ([`qfi_numeric`]) and compare against the coherent-state benchmark
//!    ([`qfi_coherent_analytic`]).
//!
//! The [`scenarios`] module wires these into parameter sweeps.

pub mod channels;
pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod metrology;
pub mod scenarios;

pub use channels::{
    evolve_coherent, evolve_dilation_oracle, evolve_single_mode, evolve_source, reduced_state,
    ChannelParams, EnvironmentSpec,
};
pub use error::{Error, Result};
pub use gaussian::{
    beam_splitter, check_physical, check_separable, coherent_state, make_source, reorder,
    source_for_signal, symplectic_eigenvalues, thermal_state, GaussianState, Ordering,
    PhysicalityReport, SourceSpec, SymplecticForm, TwoModeCov, PHYSICALITY_TOL, SYMMETRY_TOL,
};
pub use metrology::{
    fidelity_displaced, fidelity_general, fidelity_zero_mean, fidelity_zero_mean_matrix, gamma_dec,
    log_fidelity, matrix_sqrt_denman_beavers, matrix_sqrt_principal, qcr_error_bound,
    qfi_coherent_analytic, qfi_numeric, qfi_numeric_with, BenchmarkParams, QfiResult, StepControl,
};
pub use scenarios::table::{read_csv, write_csv};
pub use scenarios::{
    default_tau_grid, ordering_report, preset, separable_boundary_correlation, sweep, tau_grid,
    thermal_occupation, Curve, CurveSummary, OrderingReport, ScenarioName, ScenarioPreset,
    SweepRow, COINCIDENCE_TOL,
};
