use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite field value at {point:?}")]
    Evaluation { point: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("point is on a focal submanifold (sin(g tau) = {sin_g_tau:e})")]
    SingularPoint { sin_g_tau: f64 },

    #[error("level value {s} outside [-1, 1]; family is not isoparametric")]
    CorruptedFamily { s: f64 },

    #[error("not a generic regular value: {0}")]
    RegularValue(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("tangential Jacobian is near singular (|det| = {det:e})")]
    NearSingular { det: f64 },

    #[error("sampling failure: {0}")]
    Sampling(String),

    #[error("inconsistent results: {0}")]
    Inconsistency(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integrator step size underflow at r = {r}")]
    Stiffness { r: f64 },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("tolerance not reached: {0}")]
    Tolerance(String),

    #[error("invalid state: {0}")]
    State(String),
}

impl Error {
    /// True for failures caused by floating point behaviour rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Evaluation { .. }
                | Error::Numerical(_)
                | Error::NearSingular { .. }
                | Error::Stiffness { .. }
                | Error::Solver(_)
                | Error::Tolerance(_)
                | Error::Sampling(_)
        )
    }
}
