use serde::Serialize;
use thiserror::Error;

/// Every failure the toolkit can report.
///
/// Variants carry enough numeric context to be serialized as diagnostics.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum SpectraError {
    #[error("profile is not strictly increasing: min f0'(r)/r = {min_slope:e} at r = {at:.6}")]
    NonMonotone { min_slope: f64, at: f64 },
    #[error("profile changes sign on [0,1]: f0(0) = {f0_at_0}, f0(1) = {f0_at_1}")]
    SignChange { f0_at_0: f64, f0_at_1: f64 },
    #[error("bad profile table: {reason}")]
    BadTable { reason: String },
    #[error("invalid argument: {reason}")]
    InvalidArgument { reason: String },
    #[error("quadrature did not reach tolerance on [{a}, {b}]: estimate {estimate:e}")]
    QuadratureFailure { a: f64, b: f64, estimate: f64 },
    #[error("omega = {omega} lies in the forbidden band [{kappa1}, {kappa2}]")]
    ForbiddenOmega { omega: f64, kappa1: f64, kappa2: f64 },
    #[error("omega = {omega} is singular for mode {n} (omega_hat = {omega_hat})")]
    SingularOmega { omega: f64, n: usize, omega_hat: f64 },
    #[error("fixed point iteration does not contract (lipschitz estimate {lipschitz:.4}) and the collocation fallback failed")]
    NoContraction { lipschitz: f64 },
    #[error("tolerance {tol:e} not met: residual {residual:e}")]
    ToleranceNotMet { tol: f64, residual: f64 },
    #[error("operation requires the {expected} regime")]
    WrongRegime { expected: String },
    #[error("phase tail did not converge: bound {bound:e} at y = {y_max:e}")]
    TailNotConverged { bound: f64, y_max: f64 },
    #[error("m = {m} is outside the admissible range [{lo}, {hi}]")]
    NotAdmissible { m: usize, lo: f64, hi: f64 },
    #[error("no sign change on [{lo}, {hi}]: zeta = ({zeta_lo:e}, {zeta_hi:e})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        zeta_lo: f64,
        zeta_hi: f64,
    },
    #[error("certificate failed: {reason}")]
    CertificateFailed { reason: String },
    #[error("symmetric eigensolver failed")]
    EigenSolveFailure,
    #[error("operator is near singular: condition estimate {condition:e}")]
    NearSingular { condition: f64 },
    #[error("omega = {omega} is not a root: |zeta| = {residual:e} exceeds {tol:e}")]
    NotARoot { omega: f64, residual: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, SpectraError>;

impl SpectraError {
    pub(crate) fn invalid(reason: impl Into<String>) -> Self {
        SpectraError::InvalidArgument {
            reason: reason.into(),
        }
    }

    /// Validation failures are input problems, everything else is numeric.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            SpectraError::NonMonotone { .. }
                | SpectraError::SignChange { .. }
                | SpectraError::BadTable { .. }
                | SpectraError::InvalidArgument { .. }
                | SpectraError::ForbiddenOmega { .. }
                | SpectraError::NotAdmissible { .. }
                | SpectraError::WrongRegime { .. }
        )
    }
}
