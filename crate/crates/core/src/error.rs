use std::fmt;

/// Pipeline stage, attached to errors raised inside [`crate::uniformize::uniformize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Puncture,
    Dirichlet,
    InitialGuess,
    Solve,
    Layout,
    Normalize,
    Lift,
    Assemble,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Puncture => "puncture",
            Stage::Dirichlet => "dirichlet",
            Stage::InitialGuess => "initial-guess",
            Stage::Solve => "solve",
            Stage::Layout => "layout",
            Stage::Normalize => "normalize",
            Stage::Lift => "lift",
            Stage::Assemble => "assemble",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    // combinatorics
    #[error("face list is not a simplicial complex: {0}")]
    NonSimplicial(String),
    #[error("edge ({0}, {1}) lies in more than two faces")]
    NonManifoldEdge(usize, usize),
    #[error("vertex {vertex} has a bad link: {reason}")]
    BadLink { vertex: usize, reason: String },
    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),
    #[error("triangulation is not a closed sphere")]
    NotClosed,
    #[error("link of vertex {0} is degenerate")]
    DegenerateLink(usize),

    // metric
    #[error("inadmissible edge lengths in face {face}: {reason}")]
    InadmissibleLengths { face: usize, reason: String },
    #[error("length vector has {got} entries, triangulation has {expected} edges")]
    LengthMismatch { expected: usize, got: usize },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("spherical scaling out of range on edge {edge}: scaled sine {value}")]
    OutOfRange { edge: usize, value: f64 },

    // linear algebra / graphs
    #[error("operator is not positive definite")]
    NotPositiveDefinite,
    #[error("conjugate gradient did not reach tolerance in {0} iterations")]
    NoConvergence(usize),
    #[error("exhaustive isoperimetric search needs at most {limit} vertices, got {got}")]
    TooLargeForExhaustive { limit: usize, got: usize },

    // stereographic bridge
    #[error("point is at the north pole")]
    AtPole,
    #[error("zero vector has no central projection")]
    ZeroVector,
    #[error("vertex {vertex} is not on the unit sphere (|p| = {norm})")]
    NotInscribed { vertex: usize, norm: f64 },
    #[error("vertex {0} is not at the north pole")]
    PoleNotVertex(usize),
    #[error("layout is not strictly Delaunay at edge ({0}, {1}), margin {2:e}")]
    NotDelaunay(usize, usize, f64),
    #[error("boundary vertex {0} has curvature {1:e} <= 0")]
    BoundaryNotConvex(usize, f64),
    #[error("certificate failure: {0}")]
    CertificateFailure(String),

    // uniformizer
    #[error("marked vertices must be distinct")]
    CoincidentMarks,
    #[error("marked vertex {0} is not a vertex of the mesh")]
    MarkOutOfRange(usize),
    #[error("no admissible starting factor after {0} halvings")]
    NoAdmissibleStart(usize),
    #[error("line search stalled after {0} halvings")]
    StuckLineSearch(usize),
    #[error("no convergence after {0} iterations (residual {1:e})")]
    MaxIterations(usize, f64),
    #[error("iterate left the admissible region: {0}")]
    LeftAdmissibleRegion(String),
    #[error("layout holonomy residual {0:e} exceeds tolerance")]
    HolonomyResidualExceeded(f64),
    #[error("layout boundary is not a convex polygon at vertex {0}")]
    NonConvexBoundary(usize),
    #[error("apex factor estimates disagree by {0:e}")]
    InconsistentApex(f64),
    #[error("edge ({0}, {1}) length disagrees with the lifted polyhedron by {2:e}")]
    EdgeDictionaryMismatch(usize, usize, f64),

    // surface lab
    #[error("subdivision level {0} is too large")]
    LevelTooLarge(usize),
    #[error("edge {0} would have arc length >= pi")]
    ArcTooLong(usize),
    #[error("marked points are not mesh vertices")]
    MarksNotVertices,

    // io
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, stage: Stage) -> Error {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, stripped of stage provenance.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// Process exit code for the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Parse(_) | Error::Io(_) => 2,
            Error::NotPositiveDefinite
            | Error::NoConvergence(_)
            | Error::NoAdmissibleStart(_)
            | Error::StuckLineSearch(_)
            | Error::MaxIterations(..)
            | Error::LeftAdmissibleRegion(_)
            | Error::HolonomyResidualExceeded(_) => 4,
            Error::NotDelaunay(..)
            | Error::BoundaryNotConvex(..)
            | Error::CertificateFailure(_)
            | Error::NonConvexBoundary(_)
            | Error::InconsistentApex(_)
            | Error::EdgeDictionaryMismatch(..) => 5,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
