//! Criterion benchmarks for chaingeo; see `benches/geometry.rs`.
