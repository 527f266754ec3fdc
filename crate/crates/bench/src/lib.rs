//! Benchmarks live in `benches/`; run them with `cargo bench -p minority-bench`.
