//! Library surface of the experiment front end: config parsing, study
//! dispatch, and output emission. The `monotrack` binary is a thin clap
//! wrapper over [`runner::run`].

pub mod config;
pub mod emit;
pub mod runner;
