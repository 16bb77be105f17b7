use thiserror::Error;

/// Errors raised by curve and surface construction, evaluation and interrogation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("parameter {value} outside domain [{min}, {max}]")]
    Domain { value: f64, min: f64, max: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid form: {0}")]
    Form(String),

    #[error("unsupported derivative order {0} (expected 1 or 2)")]
    UnsupportedOrder(usize),

    #[error("singular parameter t = {t}{}: first derivative vanishes", index.map(|i| format!(" (sample {i})")).unwrap_or_default())]
    SingularParameter { t: f64, index: Option<usize> },

    #[error("singular endpoint of {which} curve: first derivative vanishes")]
    SingularEndpoint { which: &'static str },

    #[error("curvature {kappa} is too small for a finite osculating circle")]
    InfiniteRadius { kappa: f64 },

    #[error("singular surface point at (u, v) = ({u}, {v}): partial derivatives are degenerate")]
    SingularSurfacePoint { u: f64, v: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl GeomError {
    pub(crate) fn domain(value: f64, (min, max): (f64, f64)) -> Self {
        GeomError::Domain { value, min, max }
    }

    pub(crate) fn at_sample(self, index: usize) -> Self {
        match self {
            GeomError::SingularParameter { t, .. } => GeomError::SingularParameter {
                t,
                index: Some(index),
            },
            other => other,
        }
    }
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
