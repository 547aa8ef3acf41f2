use thiserror::Error;

/// Errors produced by the workbench, tagged with the subsystem they came from.
#[derive(Debug, Error)]
pub enum DhcError {
    #[error("domain: {0}")]
    Domain(String),

    #[error("target: singular projection{}", match .node {
        Some(n) => format!(" at node {n}"),
        None => String::new(),
    })]
    SingularProjection { node: Option<usize> },

    #[error("target: point off manifold by {dist:.3e} (tolerance {tol:.3e})")]
    OffManifold { dist: f64, tol: f64 },

    #[error("fields: {0}")]
    Field(String),

    #[error("{context}: imaginary leak {leak:.3e} exceeds tolerance {tol:.3e}")]
    ImaginaryLeak {
        context: &'static str,
        leak: f64,
        tol: f64,
    },

    #[error("solver: {0}")]
    Solver(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, DhcError>;
