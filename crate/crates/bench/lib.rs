//! Benchmark-only crate; the suites live under benches/.
