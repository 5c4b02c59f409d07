//! Criterion benchmarks for the hyperwitness crate; see `benches/`.
