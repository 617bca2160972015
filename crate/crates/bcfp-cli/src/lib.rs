//! Library surface of the `bcfp` command-line tool: experiment
//! configuration, grid execution, and reporting. The binary in
//! `main.rs` is a thin argument layer over these modules; integration
//! and acceptance tests drive them directly.

pub mod config;
pub mod report;
pub mod runner;
pub mod svg;
