//! Command-line front end: validation with diagnostics, corpus generation,
//! table dumps and a wall-clock benchmark harness.

pub mod algo;
pub mod bench;
pub mod commands;
pub mod report;

pub use algo::{Algo, Validator};
pub use bench::{run_bench, BenchConfig, BenchError, BenchInput, BenchReport};
pub use report::{emit_report, Format};
