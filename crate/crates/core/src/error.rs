use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A required column or field is absent.
    #[error("schema error: missing column `{0}`")]
    Schema(String),

    #[error("structure error: expected turn {expected}, found turn {found}")]
    NonContiguousTurns { expected: u32, found: u32 },

    #[error("structure error: {0}")]
    Structure(String),

    #[error("pairing error: {0}")]
    Pairing(String),

    #[error("window error: turn {turn} needs at least {required} prior turns of history")]
    Window { turn: u32, required: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("mode error: offline features need outcome fields, missing for match `{0}`")]
    MissingOutcome(String),

    #[error("split error: {0}")]
    Split(String),

    #[error("stratification error: {0}")]
    Stratification(String),

    #[error("degenerate class: {0}")]
    DegenerateClass(String),

    #[error("weak learner error: no decision stump beats chance (weighted error {error})")]
    WeakLearner { error: f64 },

    #[error("convergence error: no convergence after {iterations} iterations (KKT gap {residual})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("contract error: {0}")]
    Contract(String),

    #[error("sample-size error: {found} points, need at least {required}")]
    SampleSize { found: usize, required: usize },

    #[error("rank error: regressor is constant")]
    Rank,

    #[error("selection error: {0}")]
    Selection(String),

    #[error("domain error: negative value {value} at index {index}")]
    NegativeValue { index: usize, value: f64 },
}
