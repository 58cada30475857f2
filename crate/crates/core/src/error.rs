//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("lambda generator index must be an odd integer >= 3, got {0}; even zeta values are rational and belong in the rational part")]
    InvalidLambdaIndex(u32),

    #[error("lambda-degree cap exceeded: monomial of total weight {weight} over cap {cap}")]
    LambdaDegreeCap { weight: usize, cap: usize },

    #[error("numeric evaluation overflowed to a non-finite value")]
    NonFiniteValue,

    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("operand belongs to a different Lie algebra")]
    AlgebraMismatch,

    #[error("degree {degree} exceeds truncation order {order} of the operator")]
    DegreeExceedsTruncation { degree: usize, order: usize },

    #[error("total degree {degree} exceeds the configured cap {cap}")]
    DegreeOverCap { degree: usize, cap: usize },

    #[error("operator has a nonzero constant term; exponential requires order >= 1")]
    NonzeroConstantTerm,

    #[error("operator constant term is not an invertible rational (it is {0})")]
    NonInvertibleConstantTerm(String),

    #[error("antisymmetry violated: f[{i}][{j}]^{k} = {lhs} but f[{j}][{i}]^{k} = {rhs}")]
    AntisymmetryViolation {
        i: usize,
        j: usize,
        k: usize,
        lhs: String,
        rhs: String,
    },

    #[error("Jacobi identity violated at basis indices (i,j,k,l) = ({i},{j},{k},{l}): cyclic sum = {value}")]
    JacobiViolation {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        value: String,
    },

    #[error("invalid Lie algebra description: {0}")]
    InvalidAlgebra(String),

    #[error("unknown built-in algebra '{0}'")]
    UnknownAlgebra(String),

    #[error("operand is not homogeneous")]
    NonHomogeneous,

    #[error("parse error at byte {at}: {message}")]
    Parse { at: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph has {edges} edges but a top-degree weight form needs {expected}")]
    EdgeCount { edges: usize, expected: usize },

    #[error("graph size n = {0} exceeds the hard cap n <= {1}")]
    GraphCapExceeded(usize, usize),

    #[error("no gauge fixing implemented for m = {0} boundary points")]
    UnsupportedGauge(usize),

    #[error("propagator evaluated at a singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("propagator argument outside its domain: {0}")]
    PropagatorDomain(String),

    #[error("star order k = {0} is only cross-checked for k <= 2")]
    OrderCapExceeded(usize),
}
