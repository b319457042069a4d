//! Criterion benchmarks for `lamina`; see `benches/core.rs`.
