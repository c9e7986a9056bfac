//! Criterion benchmarks for `ffmoment-core`; see `benches/`.
