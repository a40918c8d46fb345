use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("entry ({row}, {col}) outside a {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("conjugate gradients did not converge in {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("matrix is singular: pivot {pivot} has magnitude {magnitude:e}")]
    SingularMatrix { pivot: usize, magnitude: f64 },

    #[error("element {element} is degenerate (volume {volume:e})")]
    DegenerateElement { element: usize, volume: f64 },

    #[error("node {node} has modulus {modulus:e}, below the normalization floor {floor}")]
    BelowFloor {
        node: usize,
        modulus: f64,
        floor: f64,
    },

    #[error("could not complete a tangent frame at node {node}")]
    FrameCompletion { node: usize },

    #[error("non-finite value sampled at node {node}")]
    NonFinite { node: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step {step} (t = {time}) failed, min nodal modulus {min_modulus:e}: {source}")]
    Step {
        step: usize,
        time: f64,
        min_modulus: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
