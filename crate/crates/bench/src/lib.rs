//! Benchmarks for twopoint-core; see `benches/`.
