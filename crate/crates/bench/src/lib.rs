//! Criterion benchmarks for the weldlab pipeline; see `benches/pipeline.rs`.
