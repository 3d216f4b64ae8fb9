//! Gaussian fidelity, QFI extraction and the coherent-state benchmark.

mod fidelity;
mod qfi;
mod spectral;
mod sqrtm;

pub use fidelity::{
    fidelity_displaced, fidelity_general, fidelity_zero_mean, fidelity_zero_mean_matrix,
    log_fidelity,
};
pub use qfi::{
    gamma_dec, qcr_error_bound, qfi_coherent_analytic, qfi_numeric, qfi_numeric_with,
    BenchmarkParams, QfiResult, StepControl,
};
pub use sqrtm::{matrix_sqrt_denman_beavers, matrix_sqrt_principal};
