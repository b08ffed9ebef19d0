use thiserror::Error;

/// Errors shared by the symbolic, polygon, sequence and simulator layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("word is inadmissible at position {at}")]
    Inadmissible { at: usize },
    #[error("junction is inadmissible: {next} is not a successor of {prev}")]
    JunctionInadmissible { prev: u16, next: u16 },
    #[error("no symbol of the system is bi-extendable")]
    EmptySystem,
    #[error("enumeration needs {need} words, above the cap of {cap}")]
    CapExceeded { need: u128, cap: u64 },
    #[error("system has no admissible cycle")]
    NoCycles,
    #[error("direction must be non-zero")]
    ZeroDirection,
    #[error("|{index}| exceeds the materialized schedule value a_{depth}")]
    DepthExceeded { index: String, depth: usize },
    #[error("delta must satisfy 0 < delta <= 1, got {0}")]
    BadDelta(String),
    #[error("bad scan window: {0}")]
    BadWindow(String),
    #[error("system is not the two-symbol full shift")]
    BadSystem,
    #[error("orbit left the finite floating-point range")]
    NonFinite,
    #[error("point does not project into any chart rectangle")]
    NotInChart,
    #[error("itinerary stays in the chart for {valid} steps, {need} required")]
    ItineraryTooShort { valid: usize, need: usize },
    #[error("system is invalid: {0}")]
    InvalidSystem(String),
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
