use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported matrix dimension {0} (expected 2, 4 or 16)")]
    UnsupportedDimension(usize),

    #[error("expected {expected} matrix entries, found {found}")]
    EntryCount { expected: usize, found: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("Kraus set violates completeness (residual {residual:.3e})")]
    IncompleteKrausSet { residual: f64 },

    #[error("expected {expected} Kraus operators, found {found}")]
    KrausCount { expected: usize, found: usize },

    #[error("map is not completely positive (Choi eigenvalue {eigenvalue:.3e})")]
    NotCompletelyPositive { eigenvalue: f64 },

    #[error("bath spin {index} is not normalized (|alpha|^2 + |beta|^2 = {norm})")]
    UnnormalizedSpin { index: usize, norm: f64 },

    #[error("state vector is not normalized (norm^2 = {0})")]
    UnnormalizedState(f64),

    #[error("invalid constraint pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_param(
    name: &'static str,
    value: f64,
    ok: bool,
    reason: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason,
        })
    }
}
