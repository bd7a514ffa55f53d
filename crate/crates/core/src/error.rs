use num_complex::Complex64;

/// Errors produced by the numerical routines and the batch front-end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown spectrum family `{0}`")]
    UnknownFamily(String),
    #[error("missing or invalid family parameter `{0}`")]
    BadParameter(String),
    #[error("spectrum point {0} is real or too close to the real axis")]
    RealPoint(Complex64),
    #[error("spectrum point {0} is zero")]
    ZeroPoint(Complex64),
    #[error("spectrum point {0} occurs twice")]
    DuplicatePoint(Complex64),
    #[error("index {index} out of range (len {len})")]
    InvalidIndex { index: usize, len: usize },
    #[error("evaluation point {z} collides with spectrum point {lambda}")]
    Collision { z: Complex64, lambda: Complex64 },
    #[error("evaluation point {0} is a pole of the Blaschke product")]
    Pole(Complex64),
    #[error("evaluation point {z} is too close to the real axis (need Im z >= {min_im})")]
    TooCloseToAxis { z: Complex64, min_im: f64 },
    #[error("grid half-width {halfwidth} too short for Re z = {re}")]
    GridTooShort { halfwidth: f64, re: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("not enough admissible contour candidates: {0}")]
    NoAdmissibleCandidate(String),
    #[error("every slope candidate meets a zero of B")]
    AllSlopesHitZeros,
    #[error("disk budget infeasible at the requested profile; smallest achievable view sum {0:.6e}")]
    BudgetInfeasible(f64),
    #[error("logarithmic branch point of the outer weight at z = {0}")]
    BranchPoint(Complex64),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("function vanishes on the sampled line Im z = {0}")]
    VanishesOnLine(f64),
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of a numerical precondition (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Collision { .. }
                | Error::Pole(_)
                | Error::TooCloseToAxis { .. }
                | Error::GridTooShort { .. }
                | Error::NoAdmissibleCandidate(_)
                | Error::AllSlopesHitZeros
                | Error::BudgetInfeasible(_)
                | Error::BranchPoint(_)
                | Error::NonFinite(_)
                | Error::VanishesOnLine(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
