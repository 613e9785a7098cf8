//! Criterion benchmarks for the samplers and estimators; see `benches/`.
