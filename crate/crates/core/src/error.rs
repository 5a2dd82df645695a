use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty point set")]
    EmptyInput,

    #[error("non-finite coordinate in input")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("points are affinely dependent")]
    DegenerateInput,

    #[error("linear system is rank deficient: rank {rank} < {rows} rows")]
    RankDeficient { rank: usize, rows: usize },

    #[error("need at least {needed} points, found {found}")]
    TooFewPoints { needed: usize, found: usize },

    #[error("point {point} lies on the circumsphere of cell {cell:?}")]
    AmbiguousTriangulation { cell: Vec<usize>, point: usize },

    #[error("points are not in (coupled) general position: {0}")]
    NotInGeneralPosition(String),

    #[error("simplex with {size} vertices exceeds the d+2 = {max} limit")]
    DimensionOverflow { size: usize, max: usize },

    #[error("{face:?} is not a codimension-1 face of {coface:?}")]
    NotACoface { face: Vec<usize>, coface: Vec<usize> },

    #[error("simplex {simplex:?}: {source}")]
    AtSimplex {
        simplex: Vec<usize>,
        #[source]
        source: Box<Error>,
    },

    #[error("face {face:?} is ordered after its coface {coface:?}")]
    NonMonotone { face: Vec<usize>, coface: Vec<usize> },

    #[error("alternating projections did not converge within {0} sweeps")]
    IterationLimit(usize),

    #[error("simplex {0:?} is not in the complex")]
    NotInComplex(Vec<usize>),

    #[error("{n} points exceed the enumeration cap of {cap}")]
    TooLarge { n: usize, cap: usize },
}

impl Error {
    pub(crate) fn at(self, simplex: &[usize]) -> Error {
        Error::AtSimplex {
            simplex: simplex.to_vec(),
            source: Box::new(self),
        }
    }

    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyInput => "EmptyInput",
            Error::NonFinite => "NonFinite",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DegenerateInput => "DegenerateInput",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::AmbiguousTriangulation { .. } => "AmbiguousTriangulation",
            Error::NotInGeneralPosition(_) => "NotInGeneralPosition",
            Error::DimensionOverflow { .. } => "DimensionOverflow",
            Error::NotACoface { .. } => "NotACoface",
            Error::AtSimplex { source, .. } => source.kind(),
            Error::NonMonotone { .. } => "NonMonotone",
            Error::IterationLimit(_) => "IterationLimit",
            Error::NotInComplex(_) => "NotInComplex",
            Error::TooLarge { .. } => "TooLarge",
        }
    }

    /// True for errors caused by degenerate geometry rather than bad usage.
    pub fn is_general_position_failure(&self) -> bool {
        match self {
            Error::DegenerateInput
            | Error::RankDeficient { .. }
            | Error::AmbiguousTriangulation { .. }
            | Error::NotInGeneralPosition(_) => true,
            Error::AtSimplex { source, .. } => source.is_general_position_failure(),
            _ => false,
        }
    }
}
