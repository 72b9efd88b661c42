use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid level scheme: {0}")]
    InvalidScheme(String),
    #[error("invalid field configuration: {0}")]
    InvalidFields(String),
    #[error("degenerate coherence system")]
    DegenerateCoherenceSystem,
    #[error("oracle did not converge (residual norm {residual:.3e})")]
    OracleNotConverged { residual: f64 },
    #[error("grid too coarse")]
    GridTooCoarse,
    #[error("invalid hole: {0}")]
    InvalidHole(String),
    #[error("hole outside distribution support")]
    HoleOutsideSupport,
    #[error("parse error at line {line}")]
    Parse { line: usize },
    #[error("grid not uniform")]
    GridNotUniform,
    #[error("negative weight at line {line}")]
    NegativeWeight { line: usize },
    #[error("distribution has zero norm")]
    EmptyDistribution,
    #[error("distribution grids differ")]
    DistributionMismatch,
    #[error("window out of range")]
    WindowOutOfRange,
    #[error("spectra do not share a detuning grid")]
    GridMismatch,
    #[error("peak not bracketed")]
    PeakNotBracketed,
    #[error("degenerate root")]
    DegenerateRoot,
    #[error("cannot differentiate at boundary")]
    BoundaryDerivative,
    #[error("reference dispersion slope is zero")]
    ZeroReferenceSlope,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
