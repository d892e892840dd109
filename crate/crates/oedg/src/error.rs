use thiserror::Error;

/// Hard failures surfaced by the solver. Each variant carries enough
/// location context to diagnose which cell/stage produced it.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("superluminal velocity: |v|_X = {speed} at {context}")]
    Superluminal { speed: f64, context: String },

    #[error("state not admissible (D = {d}, q = {q}) at {context}")]
    NotAdmissible { d: f64, q: f64, context: String },

    #[error("primitive recovery did not converge ({method}, {iterations} iterations, residual {residual}) at {context}")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
        context: String,
    },

    #[error(
        "inadmissible cell average in cell {cell:?} (W0 = {w0}, q = {q}); state dump: {state:?}"
    )]
    InadmissibleAverage {
        cell: (usize, usize),
        w0: f64,
        q: f64,
        state: [f64; 4],
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown problem '{name}'; available: {available}")]
    UnknownProblem { name: String, available: String },

    #[error("unknown boundary condition tag '{0}'")]
    UnknownBc(String),

    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl SolverError {
    /// Prefix the error context with a stage/cell label as it propagates up.
    pub fn with_context(self, extra: &str) -> Self {
        match self {
            SolverError::Superluminal { speed, context } => SolverError::Superluminal {
                speed,
                context: format!("{extra}: {context}"),
            },
            SolverError::NotAdmissible { d, q, context } => SolverError::NotAdmissible {
                d,
                q,
                context: format!("{extra}: {context}"),
            },
            SolverError::NoConvergence {
                method,
                iterations,
                residual,
                context,
            } => SolverError::NoConvergence {
                method,
                iterations,
                residual,
                context: format!("{extra}: {context}"),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, SolverError>;
