use thiserror::Error;

/// Semantic precondition failures surfaced to callers (the CLI maps these to
/// exit code 2). Structural misuse of the series ring (mixing dimensions in
/// internal arithmetic) panics instead; public entry points validate foreign
/// input before it can reach such a panic.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum KErr {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("variable index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("series has a nonzero constant term ({0})")]
    NonzeroConstantTerm(String),

    #[error("series is not real: coefficient at ({0}) is not Hermitian-symmetric")]
    NotReal(String),

    #[error("input is not a diastasis: pure term at ({0}) is nonzero")]
    NotADiastasis(String),

    #[error("quadratic part is not positive definite (pivot {0} non-positive)")]
    IndefiniteQuadraticPart(usize),

    #[error("linear part is singular")]
    SingularLinearPart,

    #[error("exact mode cannot represent sqrt({0}); rerun in float mode")]
    IrrationalSqrt(String),

    #[error("embedding does not preserve the center: component {0} has a nonzero constant term")]
    CenterNotPreserved(usize),

    #[error("map component {0} is not holomorphic (conjugate exponents present)")]
    NotHolomorphic(usize),

    #[error("embedding differential at 0 is degenerate (rank < {expected})")]
    DegenerateDifferential { expected: usize },

    #[error("section degree mismatch: |{0:?}| and |{1:?}| are not both {2}")]
    DegreeMismatch(Vec<u32>, Vec<u32>, u32),

    #[error("basepoint section does not map to [1,0,...,0]: condition (C) violated")]
    ConditionCViolated,

    #[error("input metric is not Einstein to the checked order (residual {0:.3e})")]
    NonEinstein(f64),

    #[error("projection is not open at 0: Jacobian of the projected map is singular there")]
    DegenerateProjection,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("serialization schema error: {0}")]
    Schema(String),
}

pub type KResult<T> = Result<T, KErr>;
