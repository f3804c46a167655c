use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // graph construction
    #[error("graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },
    #[error("edge `{edge}` has non-positive or non-finite length {length}")]
    NonpositiveLength { edge: String, length: f64 },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("malformed graph description: {0}")]
    Parse(String),

    // spectral
    #[error("backends disagree at index {index}: secular {secular}, fem {fem}")]
    BackendDisagreement { index: usize, secular: f64, fem: f64 },
    #[error("found only {found} of {requested} eigenvalues below k = {k_max}")]
    ScanExhausted { found: usize, requested: usize, k_max: f64 },
    #[error("nullspace dimension {found} does not match multiplicity {expected}")]
    NullspaceDimensionMismatch { expected: usize, found: usize },
    #[error("mesh too coarse: edge `{edge}` gets {intervals} intervals (need at least 2)")]
    MeshTooCoarse { edge: String, intervals: usize },
    #[error("function vanishes identically")]
    ZeroFunction,
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("eigenvalue index {0} out of range")]
    IndexOutOfRange(usize),

    // hot spots
    #[error("eigenfunction vanishes identically")]
    ZeroEigenfunction,
    #[error("maxima are {distance} apart on the edge, more than {limit}")]
    TooFarApart { distance: f64, limit: f64 },
    #[error("not a local maximum: {0}")]
    NotMaxima(String),
    #[error("graph is not a star")]
    NotAStar,

    // catalog
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error("bad parameter `{name}`: {reason}")]
    BadParameter { name: String, reason: String },
    #[error("eigenvalue {index} has multiplicity {multiplicity}, expected simple")]
    NotSimple { index: usize, multiplicity: usize },
    #[error("eigenfunction vanishes at extremum vertex `{0}`")]
    ExtremumAtVertexValueZero(String),
    #[error("shortening {shortening} is not below incident edge length {length}")]
    ShorteningTooLarge { shortening: f64, length: f64 },
    #[error("graph has fewer than two boundary vertices")]
    NoBoundary,
    #[error("limit eigenvalue {index} has multiplicity {multiplicity}")]
    LimitEigenvalueMultiple { index: usize, multiplicity: usize },
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
    #[error("no witness found down to delta = {delta_floor}")]
    NoWitnessFound { delta_floor: f64 },
    #[error("perturbation did not separate boundary values after {iterations} steps")]
    PerturbationStalled { iterations: usize },
    #[error("multiplicity of tracked eigenvalue changed at length {length} (multiplicity {multiplicity})")]
    MultiplicityChange { length: f64, multiplicity: usize },
}

impl Error {
    /// Input problems (bad graphs, bad parameters) as opposed to numerical failures.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DisconnectedGraph { .. }
                | Error::NonpositiveLength { .. }
                | Error::DuplicateId(_)
                | Error::DanglingEndpoint { .. }
                | Error::EmptyGraph
                | Error::InvalidPoint(_)
                | Error::UnknownVertex(_)
                | Error::UnknownEdge(_)
                | Error::Parse(_)
                | Error::IndexOutOfRange(_)
                | Error::UnknownExample(_)
                | Error::BadParameter { .. }
                | Error::NotAStar
                | Error::PreconditionUnmet(_)
                | Error::ShorteningTooLarge { .. }
                | Error::NoBoundary
                | Error::MeshTooCoarse { .. }
        )
    }
}
