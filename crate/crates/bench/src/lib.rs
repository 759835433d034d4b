//! Benchmark harness for `etaq-core`; see `benches/`.
