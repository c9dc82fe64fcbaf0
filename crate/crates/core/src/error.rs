use alloc::vec::Vec;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("a polytope needs at least one point")]
    EmptyPolytope,
    #[error("ambient dimension must be at least 1")]
    ZeroAmbientDimension,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("a family in dimension {n} needs {expected} polytopes, found {found}", expected = n + 1)]
    FamilySize { n: usize, found: usize },
    #[error("index {index} out of range for a family of {len} polytopes")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("polytope has dimension {dim}, expected a full-dimensional polytope in dimension {ambient}")]
    NotFullDimensional { dim: usize, ambient: usize },
    #[error("the fan does not refine the normal fan of the polytope")]
    NotRefined,
    #[error("the polytope does not define a Cartier nef divisor on this fan")]
    NotNef,
    #[error("the two classes live on different fans")]
    FanMismatch,
    #[error("family is not essential: subset {0:?} has dim < |J|")]
    NotEssential(Vec<usize>),
    #[error("section {section}: support point {point:?} lies outside its polytope")]
    SupportOutside { section: usize, point: Vec<i64> },
    #[error("section {0} is identically zero")]
    ZeroSection(usize),
    #[error("expected {expected} sections, found {found}")]
    SectionCount { expected: usize, found: usize },
    #[error("section {section} refers to polytope {index}")]
    SectionIndex { section: usize, index: usize },
    #[error("no essential family found after {0} attempts")]
    SamplingExhausted(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("internal inconsistency: {0}")]
    Internal(&'static str),
}
