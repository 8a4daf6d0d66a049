use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix dimension {found} is not supported (expected {expected})")]
    Dimension {
        expected: &'static str,
        found: usize,
    },

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max |U^dagger U - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("eigenphase {phase} lies on the logarithm branch cut; perturb the phases and retry")]
    BranchCut { phase: f64 },

    #[error("eigendecomposition did not converge")]
    NoConvergence,

    #[error("closed form requires resonance, got |omega - gap| = {detuning:.3e}; use numerical propagation")]
    OffResonance { detuning: f64 },

    #[error("integration failed: norm drift {drift:.3e} exceeds {limit:.1e} (step too large)")]
    IntegrationFailure { drift: f64, limit: f64 },

    #[error("step too coarse: rotation angle {angle:.3e} per step exceeds {limit:.3e}")]
    InsufficientSteps { angle: f64, limit: f64 },

    #[error("envelope never accumulates a rotation angle of pi")]
    NoStoppingTime,

    #[error("target level energy {target} does not exceed source level energy {from}")]
    EnergyDirection { from: f64, target: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
