use num_complex::Complex64;
use thiserror::Error;

use crate::sphere::SpherePoint;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AlgebraError {
    #[error("the zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("a constant polynomial has no roots")]
    ConstantPolynomial,
    #[error("operation undefined for the zero function")]
    ZeroFunction,
    #[error("division by the zero function")]
    ZeroDivisor,
    #[error("degenerate Moebius matrix (ad - bc = 0)")]
    DegenerateMoebius,
    #[error("ill-conditioned root cluster: {first} and {second} cannot be separated consistently")]
    IllConditionedCluster { first: Complex64, second: Complex64 },
    #[error("root finder did not converge")]
    NoConvergence,
    #[error("root {root} fails the residual check")]
    ResidualTooLarge { root: Complex64 },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("division by the zero polynomial at byte {position}")]
    DivisionByZero { position: usize },
    #[error("exponent {exponent} at byte {position} exceeds the limit of 64 in magnitude")]
    ExponentOverflow { position: usize, exponent: i64 },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::DivisionByZero { position }
            | ParseError::ExponentOverflow { position, .. } => *position,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("field `{field}`: {source}")]
    Field {
        field: String,
        text: String,
        #[source]
        source: ParseError,
    },
    #[error("invalid Weierstrass data: {0}")]
    InvalidData(String),
    #[error("h dz = phi1 - i phi2 vanishes identically; the data requires a rotation")]
    RequiresRotation,
    #[error("{0} is a singular point (puncture or pole)")]
    SingularPoint(SpherePoint),
    #[error("all phi-forms vanish at {0}: branch point of the immersion")]
    BranchPoint(Complex64),
    #[error("numerical instability: {0}")]
    NumericalInstability(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureDiverged(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("mesh error: {0}")]
    Mesh(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Bad input or environment rather than a mathematical failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::Field { .. }
                | Error::InvalidData(_)
                | Error::Mesh(_)
                | Error::Io(_)
        )
    }
}
