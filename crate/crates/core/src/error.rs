use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max |A - A†| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi diagonalizer did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown tensor factor `{0}`")]
    UnknownFactor(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("level-shift profile is not flat on the {region} plateau (site {site})")]
    ProfileNotFlat { region: &'static str, site: usize },
    #[error("state `{label}` leaks {mass:e} of its probability outside region {region} (threshold {threshold:e})")]
    RegionLeak {
        label: String,
        region: &'static str,
        mass: f64,
        threshold: f64,
    },
    #[error("not an eigenstate: {0}")]
    NotEigenstate(String),
    #[error(
        "state has no weight on the thermally accessible spectrum (partition sum underflowed)"
    )]
    DegenerateSupport,
    #[error("every energy eigenspace is one-dimensional; no transitions are possible")]
    NoDegeneracy,
    #[error("precondition violated: {}", .0.join("; "))]
    PreconditionViolated(Vec<String>),
    #[error("ratio is vacuous: probability {probability:e} below the underflow threshold")]
    VacuousRatio { probability: f64 },
    #[error("ladder index {index} out of range 0..{len}")]
    IndexOutOfLadder { index: i64, len: usize },
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
