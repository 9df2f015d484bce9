use alloc::string::String;
use thiserror::Error;

/// Errors raised by planning-time operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("nearest-neighbor query on an empty tree")]
    EmptyTree,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// A robot description that breaks one of the model invariants.
///
/// Each variant names the offending link (by index) and field so that loaders
/// can report `links[i].joint.axis` style locations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("model has no links")]
    Empty,
    #[error("links[{link}].joint.axis: norm {norm} is not 1 (tolerance 1e-9)")]
    NonUnitAxis { link: usize, norm: f64 },
    #[error("links[{link}].joint.parent: parent {parent} must precede the link")]
    ParentOrder { link: usize, parent: usize },
    #[error("links[{link}].joint.limits: lower {lo} exceeds upper {hi}")]
    InvertedLimits { link: usize, lo: f64, hi: f64 },
    #[error("links[{link}].joint.limits: actuated joint needs limits")]
    MissingLimits { link: usize },
    #[error("links[{link}].joint.limits: fixed joint must not carry limits")]
    UnexpectedLimits { link: usize },
    #[error("links[{link}].joint.origin.rotation: quaternion norm {norm} deviates from 1 by more than 1e-6")]
    OriginRotation { link: usize, norm: f64 },
    #[error("links[{link}].{field}: radius {radius} must be positive")]
    Radius { link: usize, field: &'static str, radius: f64 },
    #[error("links[{link}].fine[{sphere}]: sphere escapes the coarse sphere by {excess}")]
    CoarseContainment { link: usize, sphere: usize, excess: f64 },
    #[error("self_pairs[{pair}]: ({a}, {b}) {reason}")]
    SelfPair { pair: usize, a: usize, b: usize, reason: &'static str },
    #[error("links[{link}]: non-finite value in {field}")]
    NonFinite { link: usize, field: &'static str },
}

/// A scene primitive that breaks a geometry invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("primitives[{index}].radius: {value} must be positive")]
    Radius { index: usize, value: f64 },
    #[error("primitives[{index}].half_extents: every component must be positive")]
    HalfExtents { index: usize },
    #[error("primitives[{index}].rotation: quaternion norm {norm} deviates from 1 by more than 1e-6")]
    Rotation { index: usize, norm: f64 },
    #[error("primitives[{index}]: non-finite value")]
    NonFinite { index: usize },
}
