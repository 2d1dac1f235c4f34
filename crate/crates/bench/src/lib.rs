//! Criterion benchmarks for the `lawvere` kernels live under `benches/`.
