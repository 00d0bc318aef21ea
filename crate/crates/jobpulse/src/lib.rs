//! File formats, configuration and the command-line front end for the
//! JobPulse pipeline. The pipeline logic itself is in `jobpulse-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod files;
pub mod manifest;
pub mod render;

pub use error::Error;
