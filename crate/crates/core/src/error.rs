use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gamma has a pole at {0}")]
    Pole(f64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("series truncated at {terms} terms, tail estimate {tail:e} exceeds tolerance {tol:e}")]
    TruncationNotConverged { terms: usize, tail: f64, tol: f64 },

    #[error("order out of range: {0}")]
    OrderOutOfRange(String),

    #[error("quadrature did not reach tolerance on [{a}, {b}]: error estimate {err:e}")]
    Quadrature { a: f64, b: f64, err: f64 },

    #[error("root finding failed for n={n}: residual {residual:e}")]
    RootFinding { n: usize, residual: f64 },

    #[error("evaluation point {x} is on the wrong side of the base point {a}")]
    WrongSide { x: f64, a: f64 },

    #[error("infeasible order choice: {0}")]
    Infeasible(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("constant diverges: {0}")]
    Divergent(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
