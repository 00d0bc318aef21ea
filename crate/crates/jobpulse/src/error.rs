use std::io;
use std::path::PathBuf;

use jobpulse_core::pipeline::PipelineError;
use jobpulse_core::synth::SynthError;
use jobpulse_core::taxonomy::TaxonomyError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: line {line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Taxonomy { path: PathBuf, source: TaxonomyError },
    #[error("config: {0}")]
    Config(String),
    #[error("synth: {0}")]
    Synth(#[from] SynthError),
    #[error("{0}")]
    Pipeline(#[from] PipelineError),
    /// Inputs break a data contract, e.g. a repeated `(job_id, region)`.
    #[error("{0}")]
    Contract(String),
}

impl Error {
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Contract(_) | Error::Pipeline(PipelineError::Dedup(_)) => 2,
            _ => 1,
        }
    }
}
