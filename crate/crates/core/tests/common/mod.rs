#![allow(dead_code)]

use corrtherm_core::linalg::{direct_sum, embed_two_mode};
use corrtherm_core::{
    beam_splitter, make_source, ChannelParams, EnvironmentSpec, GaussianState, SourceSpec,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn squeezer(r: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[(-r).exp(), 0.0, 0.0, r.exp()])
}

fn rotation(phi: f64) -> DMatrix<f64> {
    let (s, c) = phi.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, s, -s, c])
}

fn local(ops: &[DMatrix<f64>]) -> DMatrix<f64> {
    ops[1..]
        .iter()
        .fold(ops[0].clone(), |acc, m| direct_sum(&acc, m))
}

/// Random symplectic on `n` modes (mode-major): local squeezers and rotations
/// interleaved with beam splitters.
pub fn random_symplectic(rng: &mut impl Rng, n: usize, max_squeeze: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    for _ in 0..2 {
        let rot: Vec<_> = (0..n)
            .map(|_| rotation(rng.random_range(0.0..6.3)))
            .collect();
        let sq: Vec<_> = (0..n)
            .map(|_| squeezer(rng.random_range(-max_squeeze..max_squeeze)))
            .collect();
        s = local(&sq) * local(&rot) * s;
        for i in 0..n {
            for j in (i + 1)..n {
                let bs = beam_splitter(rng.random_range(0.0..1.0)).unwrap();
                s = embed_two_mode(n, i, j, &bs) * s;
            }
        }
    }
    s
}

/// `S diag(ν) Sᵀ` with symplectic eigenvalues drawn from `[1/2, 1/2 + max_n]`.
pub fn random_cov(rng: &mut impl Rng, n: usize, max_n: f64, max_squeeze: f64) -> DMatrix<f64> {
    let nus: Vec<f64> = (0..n).map(|_| 0.5 + rng.random_range(0.0..max_n)).collect();
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        2 * n,
        nus.iter().flat_map(|&v| [v, v]),
    ));
    let s = random_symplectic(rng, n, max_squeeze);
    let v = &s * d * s.transpose();
    (&v + v.transpose()) * 0.5
}

pub fn random_state(rng: &mut impl Rng, n: usize) -> GaussianState {
    let cov = random_cov(rng, n, 3.0, 0.6);
    let mean = DVector::from_iterator(2 * n, (0..2 * n).map(|_| rng.random_range(-2.0..2.0)));
    GaussianState::new(mean, cov).unwrap()
}

pub fn random_source(rng: &mut impl Rng) -> GaussianState {
    let eta = rng.random_range(0.005..1.0);
    let n_low = rng.random_range(0.0..2.0);
    let n_high = n_low + rng.random_range(0.0..100.0);
    make_source(&SourceSpec::new(eta, n_high, n_low).unwrap())
}

/// Physical environment with `|g|, |g'|` inside the allowed region.
pub fn random_env(rng: &mut impl Rng) -> EnvironmentSpec {
    loop {
        let t0 = rng.random_range(0.05..=1.0);
        let w1: f64 = 0.5 + rng.random_range(0.0..30.0);
        let w2: f64 = 0.5 + rng.random_range(0.0..30.0);
        let bound = ((2.0 * w1 - 1.0) * (2.0 * w2 - 1.0)).sqrt() / 2.0;
        let g = rng.random_range(-1.0..=1.0) * bound;
        let gp = rng.random_range(-1.0..=1.0) * bound;
        if let Ok(env) = EnvironmentSpec::new(t0, w1, w2, g, gp) {
            return env;
        }
    }
}

pub fn random_params(rng: &mut impl Rng) -> ChannelParams {
    let tau = rng.random_range(0.0..=1.0);
    ChannelParams::new(tau, random_env(rng)).unwrap()
}

/// Thermal single-mode fidelity `1 / (√((n1+1)(n2+1)) - √(n1 n2))`.
pub fn thermal_fidelity_oracle(n1: f64, n2: f64) -> f64 {
    1.0 / (((n1 + 1.0) * (n2 + 1.0)).sqrt() - (n1 * n2).sqrt())
}
