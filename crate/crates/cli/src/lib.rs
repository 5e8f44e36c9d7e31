//! Library side of the `notchwave` command-line tool: config parsing, the waveform
//! file format, CSV reports and the canned reproductions.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod repro;
pub mod waveform_file;

pub use error::{CliError, Result};
