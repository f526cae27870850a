//! Benchmarks for the cokernel engine live in `benches/engine.rs`.
