use thiserror::Error;

use crate::exact::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("probability space has no atoms")]
    EmptySpace,
    #[error("atom id must be non-empty")]
    EmptyAtomId,
    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),
    #[error("atom `{atom}` has non-positive mass {mass}")]
    NonpositiveMass { atom: String, mass: Rational },
    #[error("atom masses do not sum to 1 (deficit {deficit})")]
    MassSumNotOne { deficit: Rational },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("event belongs to a different probability space")]
    ForeignEvent,
    #[error("probability {0} outside [0, 1]")]
    OutOfRange(Rational),
    #[error("conditioning event has probability zero")]
    NullConditioningEvent,

    #[error("finite-dimensional space must have dimension >= 1")]
    ZeroDimension,
    #[error("vector spaces do not match: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },
    #[error("coordinate index {index} out of range for {space}")]
    IndexOutOfRange { index: u64, space: String },

    #[error("threshold {0} is negative")]
    NegativeThreshold(Rational),
    #[error("bound {0} is negative")]
    NegativeBound(Rational),
    #[error("random vector is not defined on every atom")]
    NotTotal,

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("zero vector given where a nonzero vector is required")]
    ZeroVector,
    #[error("grid is empty")]
    EmptyGrid,
    #[error("grid is invalid: {0}")]
    InvalidGrid(String),
    #[error("inconsistent witness bundle: {0}")]
    InconsistentBundle(String),
    #[error("witness bundle lacks the {0} required by the source clause")]
    MissingWitness(&'static str),
    #[error("no proof step from clause {from} to clause {to}")]
    UnsupportedEdge { from: String, to: String },

    #[error("hypothesis fails at step {index}: no bound M={m} with probability above {eps}")]
    HypothesisFails {
        index: usize,
        eps: Rational,
        m: Rational,
    },

    #[error("sequence is not certified to tend to zero: {0}")]
    UncertifiedSequence(String),
    #[error("sequence does not tend to zero: {0}")]
    SequenceNotNull(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn mismatch(left: impl std::fmt::Display, right: impl std::fmt::Display) -> Self {
        Error::SpaceMismatch {
            left: left.to_string(),
            right: right.to_string(),
        }
    }
}
