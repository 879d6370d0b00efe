use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates its documented domain.
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A model or integrator quantity became NaN or infinite.
    #[error("non-finite {term} at t = {t}")]
    NonFinite { term: String, t: f64 },

    /// The adaptive step controller shrank the step below its floor.
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    /// Every tuning rollout failed; the log holds one line per failure.
    #[error("all {} tuning rollouts failed", log.len())]
    AllRolloutsFailed { log: Vec<String> },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures raised while propagating the model, as opposed to
    /// rejected inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. } | Error::StepUnderflow { .. } | Error::AllRolloutsFailed { .. }
        )
    }
}
