//! File formats, parallel estimation, and the command-line front end for
//! `spherecert-core`.

pub mod cli;
pub mod error;
pub mod format;
pub mod parallel;
pub mod render;
pub mod sweep;

pub use error::CliError;
