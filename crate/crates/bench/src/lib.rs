//! Benchmarks for the collector and subgroup machinery live in `benches/`.
