use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("fixed direction in normal bundle: {0}")]
    FixedDirection(String),
    #[error("empty polytope")]
    EmptyPolytope,
    #[error("non-generic chamber: weight {0} pairs to zero")]
    NonGenericChamber(String),
    #[error("non-ample linearization on edge {0}")]
    NonAmple(String),
    #[error("inconsistent polarization at {0}")]
    InconsistentPolarization(String),
    #[error("non-square determinant ratio at {0}")]
    NonSquare(String),
    #[error("incomparable fixed points {0} and {1}")]
    Incomparable(String, String),
    #[error("degenerate polynomial: vertex coefficient {0} is not a unit")]
    Degenerate(String),
    #[error("degenerate polytope: {0}")]
    DegeneratePolytope(String),
    #[error("interpolation infeasible: {0}")]
    Infeasible(String),
    #[error("not a GKM model: {0}")]
    NotGkm(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degenerate Q: {0}")]
    DegenerateQ(String),
    #[error("inconsistent component counts: {0}")]
    Refinement(String),
    #[error("resonant slope: {0}")]
    Resonant(String),
    #[error("limit does not exist in this regime: {0}")]
    NoLimit(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
