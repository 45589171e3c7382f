//! Criterion benchmarks for `kstar-core`; see `benches/`.
