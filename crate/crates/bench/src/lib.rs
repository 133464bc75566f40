//! Criterion benchmarks for the gap search, interval minima, the simplex core
//! and the full bound pipeline. Run with `cargo bench -p lonely-bench`.
