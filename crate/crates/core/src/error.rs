use thiserror::Error;

/// Domain errors raised by the partition calculus.
///
/// Every variant names the precondition it enforces through
/// [`Error::precondition`], which the CLI forwards in its error documents.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid vertex label {0:?}: labels are nonempty, contain no whitespace and no '|'")]
    InvalidLabel(String),
    #[error("duplicate label {0}")]
    DuplicateLabel(String),
    #[error("negative weight {weight} at {label}")]
    NegativeWeight { label: String, weight: String },
    #[error("weights sum to {sum}, expected exactly 1")]
    NotNormalized { sum: String },
    #[error("empty support")]
    EmptySupport,
    #[error("subset key must be nonempty")]
    EmptyKey,
    #[error("derived keys {0} and {1} are not nested")]
    ChainViolation(String, String),
    #[error("join coefficient {0} lies outside [0, 1]")]
    AlphaOutOfRange(String),
    #[error("join coefficient {alpha} needs the {side} operand")]
    MissingJoinOperand { side: &'static str, alpha: String },
    #[error("label {0} is missing from the ordering")]
    OrderingIncomplete(String),
    #[error("no derived entry of cardinality at most {max_cardinality}")]
    TruncationEmpty { max_cardinality: usize },
    #[error("{0} is not a simplex of the complex")]
    NotASimplex(String),
    #[error("facet label {0} is not a vertex of the complex")]
    UnknownVertex(String),
    #[error("vertex alphabets overlap at {0}")]
    OverlappingAlphabets(String),
    #[error("no coordinates for vertex {0}")]
    MissingCoordinates(String),
    #[error("coordinates of {label} have dimension {found}, expected {expected}")]
    DimensionMismatch { label: String, expected: usize, found: usize },
    #[error("complex has more than {cap} faces")]
    FaceCapExceeded { cap: usize },
    #[error("point list is empty")]
    EmptySample,
    #[error("subset of point indices is empty")]
    EmptySubset,
    #[error("point index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("star refinement fails at points {x} and {y} on key {key}")]
    StarRefinement { x: usize, y: usize, key: String },
    #[error("distance matrix: {0}")]
    InvalidMetric(String),
    #[error("cover set {set} names unknown point {point}")]
    UnknownPoint { set: String, point: String },
    #[error("point {0} lies in no cover set")]
    NotCovering(String),
    #[error("point {0} has zero clearance in every cover set containing it")]
    ZeroClearance(String),
    #[error("radius {0} must be positive")]
    NonPositiveRadius(String),
}

impl Error {
    /// Machine-readable name of the violated precondition.
    pub fn precondition(&self) -> &'static str {
        match self {
            Error::InvalidLabel(_) => "label_well_formed",
            Error::DuplicateLabel(_) => "labels_distinct",
            Error::NegativeWeight { .. } => "weights_nonnegative",
            Error::NotNormalized { .. } => "weights_sum_to_one",
            Error::EmptySupport => "support_nonempty",
            Error::EmptyKey => "subset_key_nonempty",
            Error::ChainViolation(..) => "chain_condition",
            Error::AlphaOutOfRange(_) => "alpha_in_unit_interval",
            Error::MissingJoinOperand { .. } => "join_operand_present",
            Error::OrderingIncomplete(_) => "ordering_covers_support",
            Error::TruncationEmpty { .. } => "truncated_mass_positive",
            Error::NotASimplex(_) => "support_is_simplex",
            Error::UnknownVertex(_) => "facets_within_vertices",
            Error::OverlappingAlphabets(_) => "alphabets_disjoint",
            Error::MissingCoordinates(_) => "coordinates_present",
            Error::DimensionMismatch { .. } => "coordinates_same_dimension",
            Error::FaceCapExceeded { .. } => "face_count_within_cap",
            Error::EmptySample => "points_nonempty",
            Error::EmptySubset => "subset_nonempty",
            Error::IndexOutOfRange { .. } => "index_in_range",
            Error::StarRefinement { .. } => "star_refinement",
            Error::InvalidMetric(_) => "valid_metric",
            Error::UnknownPoint { .. } => "cover_members_known",
            Error::NotCovering(_) => "cover_covers_sample",
            Error::ZeroClearance(_) => "positive_clearance",
            Error::NonPositiveRadius(_) => "radius_positive",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
