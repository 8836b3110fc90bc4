use thiserror::Error;

/// Failures raised anywhere in the library.
///
/// Variants carry enough context to locate the offending vertex, face or
/// pair; messages are meant to be shown verbatim by the command-line tool.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("geometry: face `{face}` is not inscribed in a unit circle (deviation {deviation:.3e})")]
    NonIsoradial { face: String, deviation: f64 },

    #[error("geometry: rhombus half-angle {theta:.6} of edge `{edge}` outside [{epsilon}, pi/2 - {epsilon}]")]
    DegenerateRhombus { edge: String, theta: f64, epsilon: f64 },

    #[error("geometry: malformed input: {0}")]
    MalformedGraph(String),

    #[error("geometry: unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("geometry: no diamond path between `{from}` and `{to}`")]
    NoPath { from: String, to: String },

    #[error("geometry: path between `{from}` and `{to}` crosses a train-track twice")]
    NonMinimalPath { from: String, to: String },

    #[error("geometry: vertex `{0}` does not lie on either side of the train-track")]
    VertexOnTrack(String),

    #[error("{what}: argument {value} outside the admissible range")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("{context}: spectral parameter {re}+{im}i hits a pole")]
    PoleHit { context: &'static str, re: f64, im: f64 },

    #[error("fisher: no Kasteleyn orientation satisfies face {face} ({detail})")]
    OrientationFailure { face: usize, detail: String },

    #[error("fisher: angle field fails to close modulo 4pi at {at} (residue {residue:.3e})")]
    InconsistentAngles { at: String, residue: f64 },

    #[error("inverse: `{0}` is too close to the patch boundary")]
    BoundaryTooClose(String),

    #[error("inverse: no pole-free sector for pair ({x}, {y})")]
    EmptySector { x: String, y: String },

    #[error("inverse: ambiguous pole configuration for pair ({x}, {y})")]
    PoleCollision { x: String, y: String },

    #[error("{what}: no convergence (estimate {estimate:.3e}, tolerance {tolerance:.1e})")]
    NonConvergence { what: &'static str, estimate: f64, tolerance: f64 },

    #[error("gibbs: matrix is not skew-symmetric (deviation {0:.3e})")]
    NotSkewSymmetric(f64),

    #[error("gibbs: Pfaffian of odd order {0}")]
    OddOrder(usize),

    #[error("gibbs: edge set is not a matching fragment: {0}")]
    NotAMatchingFragment(String),

    #[error("gibbs: probability {0} outside [0, 1]")]
    OutOfRangeProbability(f64),

    #[error("gibbs: graph with {size} vertices exceeds the enumeration budget of {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("gibbs: graph has no perfect matching")]
    NoPerfectMatching,

    #[error("spectral: characteristic polynomial ratio not constant (relative spread {spread:.3e})")]
    RatioNotConstant { spread: f64 },

    #[error("unknown quantity `{0}`")]
    UnknownQuantity(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
