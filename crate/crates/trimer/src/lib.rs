//! File formats, parallel runner and command line for `trimer-core`.

pub mod commands;
pub mod config;
pub mod csv_io;
pub mod presets;
pub mod runner;
