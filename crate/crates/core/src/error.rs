use alloc::vec::Vec;

use thiserror::Error;

use crate::network::ShapeError;
use crate::region::HyperplaneId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("hyperplane normal is zero")]
    DegenerateHyperplane,

    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("zero-dimensional input")]
    ZeroDimension,

    #[error("invalid network: {}", describe_shape_errors(.0))]
    InvalidNetwork(Vec<ShapeError>),

    #[error("point lies outside the linear region")]
    OutsideRegion,

    #[error("point lies on hyperplane {0} (margin is zero)")]
    OnBoundary(HyperplaneId),

    #[error("layer {layer} out of range (network has {layers} hidden layers)")]
    LayerOutOfRange { layer: usize, layers: usize },

    #[error("certificate and estimate refer to different inputs")]
    MismatchedInputs,
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            expected,
        }
    }
}

fn describe_shape_errors(errors: &[ShapeError]) -> alloc::string::String {
    use core::fmt::Write;

    let mut out = alloc::string::String::new();
    for (i, e) in errors.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        let _ = write!(out, "{e}");
    }
    out
}
