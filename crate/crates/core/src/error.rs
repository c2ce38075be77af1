use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("regular tree degree must be at least 3, got {0}")]
    DegreeTooSmall(u32),

    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),

    #[error("edge list parse error at line {line}: {reason}")]
    EdgeListParse { line: usize, reason: String },

    #[error("edge list is empty")]
    EmptyEdgeList,

    #[error("component exhausted: only {achieved} nodes reachable, {requested} requested")]
    ComponentExhausted { achieved: usize, requested: usize },

    #[error("infected subgraph is not a tree; use the BFS heuristic instead")]
    NotATree,

    #[error("snapshot is loopy; use the majority-rule interactive estimator instead")]
    LoopySnapshot,

    #[error("truth probability out of range: {0}")]
    TruthProbability(String),

    #[error("direction question asked to the source")]
    DirectionAtSource,

    #[error("budget {budget} smaller than repetition count {repetition}")]
    BudgetTooSmall { budget: u64, repetition: u64 },

    #[error("{formula}: delta {delta} too large, admissible range is {admissible}")]
    DeltaOutOfRange {
        formula: &'static str,
        delta: f64,
        admissible: String,
    },

    #[error("argument out of domain: {0}")]
    OutOfDomain(String),

    #[error("snapshot parse error at line {line}: {reason}")]
    SnapshotParse { line: usize, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("no result rows to emit")]
    NoRows,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
