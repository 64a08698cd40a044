use thiserror::Error;

use crate::picard::IterationTrace;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid initial data: {0}")]
    InvalidData(String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("point ({x}, {t}) is not a lattice point")]
    NotOnLattice { x: f64, t: f64 },

    #[error("time {t} exceeds the sampled horizon {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },

    #[error("light cone reaches the lattice boundary (needs |x| <= {needed}, lattice covers {available})")]
    ConeTouchesBoundary { needed: f64, available: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Picard iteration diverged after {} iterations", .0.iterations)]
    Diverged(Box<IterationTrace>),

    #[error("fit refused: {0}")]
    Fit(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
