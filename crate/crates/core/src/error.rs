//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFiniteEntries,

    #[error("matrix is not Hermitian: relative deviation {deviation:.3e} exceeds {tol:.1e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("state is not positive semidefinite: eigenvalue {eigenvalue:.3e} below -{tol:.1e}")]
    NotPositiveSemidefinite { eigenvalue: f64, tol: f64 },

    #[error("trace is {trace} but must be 1 within {tol:.1e}")]
    NotUnitTrace { trace: f64, tol: f64 },

    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("layout {d_first}x{d_second} does not match joint dimension {joint}")]
    LayoutMismatch {
        d_first: usize,
        d_second: usize,
        joint: usize,
    },

    #[error("function is undefined on eigenvalue {eigenvalue}")]
    FunctionUndefined { eigenvalue: f64 },

    #[error("temperature must be positive, got {0}")]
    NonPositiveTemperature(f64),

    #[error("invalid probability vector: {reason}")]
    InvalidProbabilityVector { reason: String },

    #[error("correlation strength {alpha} exceeds the feasible bound {bound:.12e}")]
    CorrelationOutOfRange { alpha: f64, bound: f64 },

    #[error("rank {rank} out of range 1..={dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("scenario constraint violated: {reason}")]
    ScenarioConstraint { reason: String },

    #[error("operator is not unitary: deviation {deviation:.3e} exceeds {tol:.1e}")]
    NotUnitary { deviation: f64, tol: f64 },

    #[error("spectra do not match within {tol:.1e}: {lhs:?} vs {rhs:?}")]
    SpectrumMismatch {
        lhs: Vec<f64>,
        rhs: Vec<f64>,
        tol: f64,
    },

    #[error("expected {expected} generator parameters, got {actual}")]
    ParameterCount { expected: usize, actual: usize },

    #[error("transition is not entropy preserving: drift {drift:.3e} exceeds {tol:.1e}")]
    NotEntropyPreserving { drift: f64, tol: f64 },

    #[error("bath marginal is not thermal: trace distance {distance:.3e} exceeds {tol:.1e}")]
    BathNotThermal { distance: f64, tol: f64 },

    #[error("initial state is correlated: trace distance {distance:.3e} to product of marginals")]
    CorrelatedInitialState { distance: f64 },

    #[error("total energy increases by {delta:.3e}, beyond tolerance {tol:.1e}")]
    EnergyIncrease { delta: f64, tol: f64 },

    #[error("transition lacks a temperature for the first subsystem")]
    MissingFirstTemperature,

    #[error("coefficient of performance undefined: mutual-information change {delta_i:.3e} is not below -{cut:.1e}")]
    CopUndefined { delta_i: f64, cut: f64 },

    #[error(
        "no search iterate consumed correlations; coefficient of performance has no feasible point"
    )]
    NoFeasibleIterate,

    #[error(
        "bath cannot absorb {required_nats:.6} nats of entropy: capacity is {capacity_nats:.6}"
    )]
    NoEntropyHeadroom {
        required_nats: f64,
        capacity_nats: f64,
    },

    #[error("at most {max} parties supported, got {actual}")]
    PartyCount { max: usize, actual: usize },

    #[error("bound violated at an evaluated point: {context}")]
    BoundViolated { context: String },

    #[error("internal identity check failed: {context} (residual {residual:.3e})")]
    IdentityCheckFailed { context: String, residual: f64 },
}
