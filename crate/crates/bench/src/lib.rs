//! Criterion benchmarks for the multibag pipeline live in `benches/`.
