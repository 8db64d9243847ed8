use thiserror::Error;

use crate::spaces::Point;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("lattice dimension must be positive")]
    ZeroDimension,

    #[error("point has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("tuple has {found} vertices, a degree-{degree} chain needs {}", degree + 1)]
    TupleLength { degree: usize, found: usize },

    #[error("operation needs degree at least {min}, got {found}")]
    DegreeTooLow { min: usize, found: usize },

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("coefficient group mismatch: expected {expected}, found {found}")]
    GroupMismatch { expected: String, found: String },

    #[error("window is empty")]
    EmptyWindow,

    #[error("net is empty")]
    EmptyNet,

    #[error("separation must be positive")]
    NonPositiveSeparation,

    #[error("codimension {codim} invalid for ambient dimension {dim}")]
    InvalidCodimension { dim: usize, codim: usize },

    #[error("simplex has {found} vertices, expected {expected}")]
    SimplexDimension { expected: usize, found: usize },

    /// The simplex meets the flat in a boundary-degenerate way.
    #[error("degenerate position: {vertices:?}")]
    DegeneratePosition { vertices: Vec<Point> },

    #[error("chain support leaves the configured window at {point:?}")]
    OutsideWindow { point: Point },

    #[error("radius {radius} is below chain propagation {propagation}")]
    RadiusTooSmall { radius: i64, propagation: i64 },

    #[error("translation lattice generators are not independent")]
    DependentGenerators,

    #[error("action must have full rank {expected}, has rank {found}")]
    NotFullRank { expected: usize, found: usize },

    #[error("lattice is not a subgroup of the acting lattice")]
    NotSubgroup,

    #[error("subgroup must span the tangent directions of the flat and fix it")]
    IncompatibleSubgroup,

    #[error("chain is not a cycle")]
    NotACycle,

    #[error("boundary matrices do not compose to zero at degree {degree}")]
    NotAComplex { degree: usize },

    #[error("tuple {tuple:?} is not in the quotient basis of degree {degree}; increase r_max")]
    NotRepresentable { degree: usize, tuple: Vec<Point> },

    #[error("degree {degree} is outside the computed range")]
    DegreeOutOfRange { degree: usize },

    #[error("normal shear must be unimodular, has determinant {det}")]
    NotUnimodular { det: i64 },

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
