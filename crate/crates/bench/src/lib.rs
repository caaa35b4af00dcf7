//! Criterion benchmarks for `phs-core`; see `benches/`.
