use thiserror::Error;

use crate::centrality::CentralityError;
use crate::diffusion::DiffusionError;
use crate::experiment::ExperimentError;
use crate::graph::GraphError;
use crate::srd::SrdError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-level error, one variant per module.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Centrality(#[from] CentralityError),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Srd(#[from] SrdError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True when an iterative solver gave up before reaching its tolerance.
    pub fn is_non_convergence(&self) -> bool {
        match self {
            Error::Centrality(e) => e.is_non_convergence(),
            Error::Experiment(ExperimentError::Centrality(e)) => e.is_non_convergence(),
            _ => false,
        }
    }
}
