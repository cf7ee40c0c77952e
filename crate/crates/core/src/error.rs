use thiserror::Error;

use crate::search_tree::Violation;
use crate::topology::VertexId;

/// Errors raised while reading one of the line-oriented text formats.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty document")]
    Empty,
    #[error("line {line}: cannot parse {content:?}")]
    BadLine { line: usize, content: String },
    #[error("line {line}: vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { line: usize, vertex: u32, n: usize },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: u32 },
    #[error("line {line}: duplicate edge {u} {v}")]
    DuplicateEdge { line: usize, u: u32, v: u32 },
    #[error("line {line}: edge {u} {v} closes a cycle")]
    Cycle { line: usize, u: u32, v: u32 },
    #[error("graph is disconnected ({edges} edges for {n} vertices)")]
    Disconnected { edges: usize, n: usize },
    #[error("search tree document: {0}")]
    Tree(String),
}

/// Errors raised by the machine when an operation is illegal in its current state.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("no search session is open")]
    NoSession,
    #[error("a search session for {0} is already open")]
    SessionOpen(VertexId),
    #[error("finger is at the root {0}; it has no parent")]
    ParentOfRoot(VertexId),
    #[error("{child} is not a child of the finger {finger}")]
    NotAChild { finger: VertexId, child: VertexId },
    #[error("cannot rotate the root {0}")]
    RotateRoot(VertexId),
    #[error("session ended before its target {0} was touched")]
    TargetNotTouched(VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
}

/// Errors for the structural operations of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GstError {
    #[error("the two vertices must differ (got {0} twice)")]
    SameVertex(VertexId),
    #[error("vertex set must be nonempty")]
    EmptySet,
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("cannot rotate the root {0}")]
    RotateRoot(VertexId),
    #[error("invalid search tree: {0}")]
    InvalidTree(Violation),
    #[error("vertex set is not Steiner-closed")]
    NotSteinerClosed,
    #[error("{what}: limit {limit}, got {got}")]
    GuardExceeded {
        what: &'static str,
        limit: usize,
        got: usize,
    },
    #[error("unknown preferred path {0}")]
    UnknownPath(u32),
    #[error("cut depth {depth} outside ({min}, {max}]")]
    CutDepth { depth: u32, min: u32, max: u32 },
    #[error("merge precondition violated: {0}")]
    MergePrecondition(String),
    #[error("machine error at op {index}: {source}")]
    Replay {
        index: usize,
        #[source]
        source: MachineError,
    },
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown {kind} {name:?}")]
    UnknownName { kind: &'static str, name: String },
}
