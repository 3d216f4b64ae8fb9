//! Criterion benchmarks for the fidelity and QFI kernels live in `benches/`.
