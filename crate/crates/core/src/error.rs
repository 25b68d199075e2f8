use thiserror::Error;

/// Errors raised by the library. Solver non-convergence carries its own
/// diagnostics and lives in [`crate::solver::SolveError`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid species table: {0}")]
    InvalidSpecies(String),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("smearing width {sigma} is under-resolved (needs at least {required}, i.e. two grid spacings)")]
    UnderResolved { sigma: f64, required: f64 },
    #[error("right-hand side is not neutral: mean {mean:e} exceeds {allowed:e}")]
    NotNeutral { mean: f64, allowed: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("invalid charge distribution: {0}")]
    InvalidCharge(String),
    #[error("solution residual {residual:e} too large for energy evaluation (limit {limit:e})")]
    ResidualTooLarge { residual: f64, limit: f64 },
    #[error("point-charge mode requires d = 3 (got d = {0})")]
    PointModeDimension(usize),
    #[error("unknown species index {0}")]
    UnknownSpecies(usize),
    #[error("invalid statistic: {0}")]
    InvalidStatistic(String),
    #[error("not enough samples: {got} (need {need})")]
    TooFewSamples { got: usize, need: usize },
    #[error("degenerate statistics: {0}")]
    Degenerate(String),
    #[error("selection starved: 0 of {candidates} candidates accepted; try a larger delta or candidate cap")]
    SelectionStarved { candidates: usize },
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
