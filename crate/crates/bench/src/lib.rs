//! Criterion benchmarks for the qsteg pipeline live in `benches/`.
