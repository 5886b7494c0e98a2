//! Error type shared by every chart operation.

use num_complex::Complex64;
use thiserror::Error;

use crate::symcore::Dims;

/// Failure modes of chart-level operations.
///
/// Variants carry enough data to point at the offending input: a
/// dimension pair, a variable index, or the evaluation point that
/// witnessed the failure.
#[derive(Debug, Clone, Error)]
pub enum ChartError {
    #[error("dimension mismatch: expected {expected:?}, got {got:?} ({context})")]
    DimensionMismatch {
        expected: Dims,
        got: Dims,
        context: &'static str,
    },

    #[error("matrix shape mismatch: expected {expected:?}, got {got:?} ({context})")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
        context: &'static str,
    },

    #[error("metric degenerate on fiber directions at s={s:?}, t={t:?}")]
    MetricDegenerate { s: Vec<Complex64>, t: Vec<Complex64> },

    #[error("matrix block is not hermitian ({context})")]
    NotHermitian { context: &'static str },

    #[error("integrability undefined for almost Higgs fields")]
    AlmostHiggs,

    #[error("conjugation undefined: supply custom real form")]
    ConjugationUndefined,

    #[error("custom real form is not an anti-involution on this data (residual {residual:.3e})")]
    NotAnInvolution { residual: f64 },

    #[error("{what} is singular and cannot be inverted")]
    SingularMatrix { what: &'static str },

    #[error("coefficient function denominator vanishes at s={s:?}, t={t:?}")]
    DenominatorVanishes { s: Vec<Complex64>, t: Vec<Complex64> },

    #[error("coefficient functions have incompatible exponential parts ({context})")]
    IncompatibleExponentials { context: &'static str },

    #[error("expected holomorphic data but found barred variables ({context})")]
    NotHolomorphic { context: &'static str },

    #[error("lifting condition violated: coefficients depend on conjugate fiber variables ({context})")]
    LiftingConditionViolated { context: &'static str },

    #[error("comparison map check failed: {context}")]
    BetaCheckFailed { context: String },

    #[error("unsupported metric for this operation: {context}")]
    UnsupportedMetric { context: &'static str },

    #[error("imaginary part of the period is not positive at s={s:?} (value {value:.6})")]
    PeriodNotPositive { s: Complex64, value: f64 },

    #[error("path passes within {distance:.3e} of a declared puncture (margin {margin:.3e})")]
    PathTooClose { distance: f64, margin: f64 },

    #[error("path is not closed: endpoints differ by {gap:.3e}")]
    PathNotClosed { gap: f64 },

    #[error("trajectory escaped at s={s:?} with |t| = {norm:.3e}")]
    Escaped { s: Complex64, norm: f64 },

    #[error("trajectory approached a pole of the coefficient field at s={s:?} (|den| = {den:.3e})")]
    PoleProximity { s: Complex64, den: f64 },

    #[error("integrator step size collapsed at s={s:?}")]
    StepCollapse { s: Complex64 },

    #[error("integrator exceeded {max_steps} steps")]
    TooManySteps { max_steps: usize },

    #[error("word enumeration exceeded the budget of {cap} words")]
    WordBudgetExceeded { cap: usize },

    #[error("invalid input: {context}")]
    InvalidInput { context: String },
}

impl ChartError {
    pub fn invalid(context: impl Into<String>) -> Self {
        ChartError::InvalidInput {
            context: context.into(),
        }
    }
}
