use std::fmt;

/// Location-tagged failure while reading the network text format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("species `{0}` already exists")]
    NameCollision(String),

    #[error("degenerate reactions (reactant equals product) after deletion: {0:?}")]
    DegenerateReactions(Vec<usize>),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("point outside the evaluation domain: {0}")]
    Domain(String),

    #[error("invalid lift: {0}")]
    InvalidLift(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty stoichiometric class: {0}")]
    EmptyClass(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration {
        t: f64,
        state: Vec<f64>,
        reason: String,
    },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("singular Jacobian at a non-root (possible fold): {0}")]
    SingularJacobian(String),

    #[error("periodic orbit search failed: {0}")]
    Orbit(String),

    #[error("branch lost at parameter {param}: {reason}")]
    BranchLost { param: f64, reason: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
