//! Benchmark-only crate; see `benches/protocols.rs`.
//!
//! Run with `cargo bench -p ecp-bench`.

pub use ecp_core;
