use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Text-format parse failure, reported with the 1-based line number.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("invalid palette: {0}")]
    InvalidPalette(String),

    #[error("invalid weighting: {0}")]
    InvalidWeighting(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown colour {0}")]
    UnknownColour(u32),

    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("grid oracle would enumerate {points} simplex points, over the budget of {budget}")]
    OracleBudget { points: u128, budget: u128 },

    #[error("exhaustive audit refused: n={n} exceeds the cap of {cap} for this mode")]
    ExhaustiveCap { n: usize, cap: usize },

    #[error("vertex classes must be disjoint")]
    ClassesNotDisjoint,

    #[error("solver value {value} fell below the grid oracle bound {oracle} at resolution {resolution}")]
    Certification {
        value: f64,
        oracle: f64,
        resolution: u32,
    },

    #[error("{0}")]
    InvalidInput(String),
}
