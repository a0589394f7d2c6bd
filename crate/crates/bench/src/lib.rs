//! Benchmark driver: tables, figure sweeps and acceptance checks.

pub mod acceptance;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod reference;
pub mod tables;
