//! Criterion benchmarks for panel computation; see `benches/`.
