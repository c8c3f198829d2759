use thiserror::Error;

use crate::engine::IterationTrace;
use crate::learning::LearnResult;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("atom roster is empty")]
    EmptyRoster,
    #[error("{0} atoms exceed the supported maximum of 64")]
    TooManyAtoms(usize),
    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),
    #[error("invalid identifier `{0}`")]
    BadIdentifier(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("label `{label}` names the same element as `{existing}`")]
    AliasedElement { label: String, existing: String },
    #[error("element {bits:#b} does not belong to a lattice of {atoms} atoms")]
    ForeignElement { bits: u64, atoms: usize },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("malformed label `{0}`")]
    MalformedLabel(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("malformed table: {0}")]
    Format(String),
    #[error("no greatest y with {a}·y ≤ {b}")]
    NoResidual { a: String, b: String },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
}

#[derive(Debug, Clone, Error)]
pub enum EngineError {
    #[error("invalid engine configuration: {0}")]
    Config(String),
    #[error("unknown case `{0}`")]
    UnknownCase(String),
    #[error("state has {got} values but the model has {expected} concepts")]
    StateShape { expected: usize, got: usize },
    #[error("no fixed point after {} iterations", .trace.steps)]
    NotConverged { trace: Box<IterationTrace> },
}

#[derive(Debug, Clone, Error)]
pub enum LearnError {
    #[error("invalid learning configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("targets still outside their desired sets after {} rounds", .last.outer_rounds)]
    Failed { last: Box<LearnResult> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("no concepts declared")]
    NoConcepts,
    #[error("duplicate concept `{0}`")]
    DuplicateConcept(String),
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("concept index {0} out of range")]
    ConceptIndex(usize),
    #[error("duplicate weight entry {src} -> {dst}")]
    DuplicateWeight { src: String, dst: String },
    #[error("duplicate case `{0}`")]
    DuplicateCase(String),
    #[error("case `{case}` assigns no value to concept `{concept}`")]
    MissingInit { case: String, concept: String },
    #[error("case `{case}` has {got} values for {expected} concepts")]
    InitShape {
        case: String,
        expected: usize,
        got: usize,
    },
    #[error("case `{case}`: edits must start at step 1 or later")]
    EditAtZero { case: String },
    #[error("desired-output list for `{0}` is empty")]
    EmptyDoc(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}
