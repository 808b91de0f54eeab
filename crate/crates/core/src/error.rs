use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("graph parse error: {0}")]
    GraphParse(String),
    #[error("target vertex {0} has no in-neighbors and cannot be covered")]
    UncoverableTarget(usize),
    #[error("graph has {k} vertices, exact computation capped at {max_k}")]
    TooLarge { k: usize, max_k: usize },
    #[error("invalid dominating set: {0}")]
    InvalidDominatingSet(String),
    #[error("non-finite loss at coordinate {0}")]
    NonFinite(usize),
    #[error(
        "simplex solver did not converge after {iterations} iterations \
         (bracket [{lo}, {hi}], residual {residual:e})"
    )]
    NoConvergence {
        iterations: usize,
        lo: f64,
        hi: f64,
        residual: f64,
    },
    #[error("point is on the simplex boundary at coordinate {0}")]
    BoundaryPoint(usize),
    #[error("observed vertex {0} has zero observation probability")]
    ZeroObservationProbability(usize),
    #[error("graph is not strongly observable")]
    NotStronglyObservable,
    #[error("graph is not weakly observable")]
    NotWeaklyObservable,
    #[error("graph is not observable")]
    Unobservable,
    #[error("V2 is empty; the two-block policy needs undominated vertices")]
    EmptyV2,
    #[error("policy call out of order: {0}")]
    SequencingViolation(&'static str),
    #[error("policy `{policy}` cannot run on a {class} graph")]
    PolicyGraphMismatch { policy: String, class: String },
    #[error("corruption budget exceeded: {spent} > {budget}")]
    BudgetExceeded { spent: f64, budget: f64 },
    #[error("loss script has {len} rounds, round {t} requested")]
    ScriptExhausted { len: usize, t: u64 },
    #[error("environment has no ground truth gaps")]
    NoGroundTruth,
    #[error("trace is missing field `{0}`")]
    MissingTraceField(&'static str),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
