use thiserror::Error;

use crate::parse::ParseError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GermError {
    #[error("zero polynomial has no germ structure")]
    ZeroPolynomial,
    #[error("polynomial does not vanish at the origin (constant term {0})")]
    NotAGerm(String),
    #[error("degree {degree} exceeds the configured cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("truncation {0} too small to separate the roots")]
    TruncationTooSmall(String),
    #[error("extension tower degree {degree} exceeds cap {cap}")]
    TowerCap { degree: usize, cap: usize },
    #[error("germ has a non-isolated singularity (repeated component)")]
    NonIsolated,
    #[error("unresolved argument tie between distinct roots: {0}")]
    ArgumentTie(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl GermError {
    /// Stable machine-readable code used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            GermError::ZeroPolynomial => "input.zero",
            GermError::NotAGerm(_) => "input.not-a-germ",
            GermError::DegreeCap { .. } => "input.degree-cap",
            GermError::Degenerate(_) => "input.degenerate",
            GermError::TruncationTooSmall(_) => "puiseux.truncation",
            GermError::TowerCap { .. } => "puiseux.tower-cap",
            GermError::NonIsolated => "invariants.non-isolated",
            GermError::ArgumentTie(_) => "puiseux.argument-tie",
            GermError::Inconsistent(_) => "internal.inconsistent",
            GermError::Parse(_) => "input.syntax",
        }
    }
}

pub type Result<T> = std::result::Result<T, GermError>;
