//! Criterion benchmarks for the intermediary mechanisms; see `benches/`.
