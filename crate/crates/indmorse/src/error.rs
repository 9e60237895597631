use thiserror::Error;

/// Crate-wide error type. `exit_code` groups variants into the process exit
/// classes used by the CLI: 2 for input/precondition errors, 3 for resource caps.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("graph has {n} vertices, maximum supported is {max}")]
    TooManyVertices { n: usize, max: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("face cap {cap} exceeded: enumeration reached {reached} faces")]
    FaceCapExceeded { cap: u64, reached: u64 },
    #[error("component {0:?} is a bare cycle; contraction would produce a loop")]
    CycleComponent(Vec<usize>),
    #[error("graph is not a forest")]
    NotAForest,
    #[error("not a feedback set: cycle {0:?} survives deletion")]
    NotAFeedbackSet(Vec<usize>),
    #[error("found two vertex-disjoint cycles {0:?} and {1:?}")]
    DisjointCyclesFound(Vec<usize>, Vec<usize>),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no reduction rule applies (registry too restricted?)")]
    NoApplicableRule,
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code class: 2 = input error, 3 = resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::FaceCapExceeded { .. } | Error::Resource(_) | Error::Overflow(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
