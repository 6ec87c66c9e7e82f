use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{particles} particles do not fit a lattice with spacing >= {min_spacing} in the box")]
    LatticeCapacity { particles: usize, min_spacing: f64 },

    #[error("coincident particles (distance {distance:e}, indices {indices:?})")]
    CoincidentParticles {
        distance: f64,
        indices: Option<(usize, usize)>,
    },

    #[error(
        "box too small for periodic linked cells: edge {edge} in dimension {dim} must exceed twice the cutoff {cutoff}"
    )]
    GridTooSmall { dim: usize, edge: f64, cutoff: f64 },

    #[error("direct summation does not support periodic boundaries")]
    PeriodicDirectSum,

    #[error("integration blew up: non-finite state at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("observable error: {0}")]
    Observable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
