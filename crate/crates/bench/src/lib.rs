//! Criterion benchmarks for `laughseg-core`; see `benches/`.
