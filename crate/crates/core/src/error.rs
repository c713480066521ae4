use thiserror::Error;

/// Errors raised by the exact geometry and evaluation routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("character has zero rank; its point lies on the line at infinity")]
    Ch0Zero,
    #[error("character points in the skyscraper direction (0, 0, c)")]
    SkyscraperDirection,
    #[error("line does not meet the parabola")]
    NoIntersection,
    #[error("labels {0} and {1} are not adjacent at a common dyadic level")]
    NotAdjacent(String, String),
    #[error("degenerate orthogonality system: {0}")]
    DegenerateSystem(String),
    #[error("point ({0}, {1}) is not a geometric stability condition")]
    NotGeometric(String, String),
    #[error("invalid stability parameters: {0}")]
    InvalidParams(String),
    #[error("both leg criteria hold strictly; tolerance breach")]
    InconsistentLegs,
    #[error("central charge vanishes")]
    ZeroCharge,
    #[error("could not parse {0:?}")]
    Parse(String),
    #[error("invalid bundle cache: {0}")]
    InvalidCache(String),
    #[error("unsupported geometry: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
