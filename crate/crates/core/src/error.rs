use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("group order exceeds cap of {cap} elements")]
    GroupTooLarge { cap: usize },

    #[error("root orbit exceeds cap of {cap} vectors")]
    RootOrbitTooLarge { cap: usize },

    #[error("invalid psi-graph: {0}")]
    InvalidGraph(String),

    /// Classification operations assume a connected graph.
    #[error("psi-graph is not connected")]
    NotConnected,

    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),

    #[error("unknown color {0:?}")]
    UnknownColor(String),

    #[error("unknown cut id {0}")]
    UnknownCut(usize),

    #[error("unknown plane id {0}")]
    UnknownPlane(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),

    #[error("contraction too large: intermediate of {entries} entries exceeds cap {cap}")]
    ContractionTooLarge { entries: usize, cap: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("solver did not converge: residual {residual:.3e} after {sweeps} sweeps")]
    NotConverged { residual: f64, sweeps: usize },

    #[error("certificate rejected: {0}")]
    CertificateRejected(String),

    #[error("wrong polytope tag: expected {expected}, found {found}")]
    WrongTag { expected: String, found: String },

    #[error("not a Cayley graph of a finite Coxeter group: {0}")]
    NotCoxeter(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
