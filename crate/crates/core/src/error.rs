//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Configuration rejected; carries the complete list of violations.
    #[error("invalid configuration: {}", violations.join("; "))]
    Config { violations: Vec<String> },

    /// The chessboard schedule cannot guarantee disjoint write regions.
    #[error(
        "supercell tiling has an odd supercell count per dimension ({counts:?}) under \
         periodic wrap, so same-color supercells would touch across the seam; pad the \
         grid or choose a supercell size that tiles each axis into an even count"
    )]
    OddSupercellCount { counts: [usize; 3] },

    /// A particle moved a full cell or more in one step.
    #[error(
        "particle displacement of {max_cells:.3} cells in one step at step {step}: \
         time step violates the one-cell-per-step limit (CFL breach upstream)"
    )]
    CflBreach { step: usize, max_cells: f64 },

    /// A particle position lies outside the periodic box.
    #[error("particle {index} at ({x}, {y}, {z}) is outside the domain")]
    ParticleOutOfDomain { index: usize, x: f64, y: f64, z: f64 },

    #[error("plane-wave mode must be a nonzero integer wavevector")]
    ZeroWavevector,

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    ConfigFileParse { path: String, line: usize, message: String },

    #[error("snapshot format error: {0}")]
    SnapshotFormat(String),

    #[error("could not build worker thread pool: {0}")]
    ThreadPool(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }

    /// Stamps the owning step counter onto errors raised by kernels that
    /// do not know it.
    pub fn with_step(self, step: usize) -> Self {
        match self {
            Error::CflBreach { max_cells, .. } => Error::CflBreach { step, max_cells },
            other => other,
        }
    }
}
