//! Error type shared by all modules of the crate.

use crate::operators::{Case, FieldOrientation};

/// Errors produced by grid construction, steady-state builders, pencil
/// assembly, eigen solves and time integration.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("grid needs at least {min} points, got {n}")]
    GridSize { n: usize, min: usize },

    #[error("density floor violated: min rho0 = {min_rho:e} < floor {floor:e}")]
    DensityFloor { min_rho: f64, floor: f64 },

    #[error("pressure must stay positive, found p0 = {p0:e} at x = {x}")]
    NonpositivePressure { p0: f64, x: f64 },

    #[error("adiabatic index must exceed 1, got gamma = {gamma}")]
    GammaRange { gamma: f64 },

    #[error("profile table must supply exactly {expected} values, got {got}")]
    TableLength { expected: usize, got: usize },

    #[error("case {case:?} requires a {required:?} background field")]
    CaseMismatch {
        case: Case,
        required: FieldOrientation,
    },

    #[error("mass matrix is not positive definite (Cholesky failed)")]
    Definiteness,

    #[error("zero vector is not admissible here")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("wave number k must be a positive integer, got {k}")]
    WaveNumber { k: u32 },

    #[error("wave-number list must be nonempty and strictly ascending")]
    SweepOrder,

    #[error("per-k solve failed at k = {k}: {source}")]
    Solver {
        k: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("eigenmode initial data needs a growing mode, principal lambda^2 = {lambda_sq:e}")]
    ModeNotGrowing { lambda_sq: f64 },

    #[error(
        "no wave number satisfies the dominance condition lambda_k^2 > Lambda^2/4 \
         (best lambda^2 = {best_lambda_sq:e}, threshold {threshold:e})"
    )]
    Dominance { best_lambda_sq: f64, threshold: f64 },

    #[error("time step dt = {dt:e} exceeds the stability limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("solution blew up (non-finite values) at step {step}")]
    BlowUp { step: usize },

    #[error("need at least {need} samples in the fit window, got {got}")]
    TooFewSamples { got: usize, need: usize },

    #[error("escape time needs 0 < delta <= theta and lambda > 0 (delta={delta}, theta={theta}, lambda={lambda})")]
    EscapeOrdering { delta: f64, theta: f64, lambda: f64 },

    #[error("total density {rho:e} at or below the positivity threshold {threshold:e}")]
    NonpositiveDensity { rho: f64, threshold: f64 },

    #[error("instability criterion is not defined for case {case:?}")]
    CriterionUnsupported { case: Case },
}

pub type Result<T> = std::result::Result<T, Error>;
