use thiserror::Error;

use crate::graph::Edge;

/// Errors raised by the recoloring engine, oracles and harness.
#[derive(Debug, Error)]
pub enum RecolorError {
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("unknown color {0}")]
    UnknownColor(u32),

    #[error("odd cycle closed by edge ({}, {})", .0.u, .0.v)]
    OddCycle(Edge),

    #[error("graph is not bipartite: edge ({}, {}) closes an odd cycle", .0.u, .0.v)]
    NotBipartite(Edge),

    #[error("degree of vertex {vertex} exceeds delta = {delta}")]
    DegreeExceeded { vertex: usize, delta: usize },

    #[error("no free color for vertex {vertex}: {detail}")]
    NoFreeColor { vertex: usize, detail: String },

    #[error("special palette exhausted ({0} colors)")]
    PaletteExhausted(usize),

    #[error("promotion of vertex {vertex} exceeded level cap {cap}")]
    LevelCapExceeded { vertex: usize, cap: u32 },

    #[error("component with {size} vertices exceeds brute-force cap {cap}; supply beta_hint instead")]
    ComponentTooLarge { size: usize, cap: usize },

    #[error("instance too large for exhaustive enumeration: n = {n} > {cap}")]
    TooManyVertices { n: usize, cap: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("audit precondition violated: {0}")]
    AuditPrecondition(String),

    #[error("accounting mismatch: {0}")]
    Accounting(String),

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<RecolorError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = RecolorError> = std::result::Result<T, E>;
