use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("configuration error: {0}")]
    Config(String),

    #[error("constant term of the series is not invertible")]
    NonInvertibleConstantTerm,
    #[error("cannot set hbar = 0: term with hbar^{0} present")]
    NegativeHbarPole(i32),

    #[error("weight data is not nef: {0}")]
    NotNef(String),
    #[error("the nef ambient needs its own cohomology presentation before downstream use")]
    PresentationRequired,
    #[error("bundle factor for degree {0:?} needs the inverse of (v + lambda), unavailable at lambda = 0")]
    NonConvexAtLambdaZero(Vec<u32>),
    #[error("bundle factor for degree {0:?} needs a lambda^-1 expansion, which is not supported")]
    NegativeBundlePairing(Vec<u32>),

    #[error("frame is not unital: constant term differs from the identity")]
    FrameNotUnital,
    #[error("connection matrix {matrix} keeps hbar^{hbar} at Q^{degree:?}, entry ({row},{col})")]
    ResidualHbar {
        matrix: usize,
        degree: Vec<u32>,
        row: usize,
        col: usize,
        hbar: i32,
    },

    #[error("the unit does not generate at t-order {0}")]
    GenerationFailure(usize),
    #[error("closedness failed for t^{j}, t^{k} at t-order {order}")]
    ClosednessFailure { j: usize, k: usize, order: usize },
    #[error("string/divisor expansion needs a mirror map with vanishing unit and divisor components")]
    StringDivisorUnavailable,

    #[error("mixed partials of the mirror map disagree at Q^{0:?}")]
    InconsistentMixedPartials(Vec<u32>),
    #[error("flatness violated after the flat coordinate change: {0}")]
    InternalFlatnessViolation(String),
    #[error("pairing is required for Gromov-Witten extraction")]
    PairingMissing,
    #[error("Gromov-Witten extraction is implemented for Picard rank 1 only")]
    NotRankOne,

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit status for the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Schema(_)
            | Error::Validation(_)
            | Error::NotNef(_)
            | Error::PresentationRequired
            | Error::NonConvexAtLambdaZero(_)
            | Error::NegativeBundlePairing(_)
            | Error::PairingMissing
            | Error::NotRankOne
            | Error::StringDivisorUnavailable => 3,
            _ => 4,
        }
    }
}
