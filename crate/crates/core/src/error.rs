use std::fmt;

use thiserror::Error;

/// One violated parameter or scenario invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub name: String,
    pub value: f64,
    pub constraint: String,
}

impl Violation {
    pub fn new(name: &str, value: f64, constraint: &str) -> Self {
        Self {
            name: name.to_string(),
            value,
            constraint: constraint.to_string(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} (got {})", self.name, self.constraint, self.value)
    }
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {}", join(.0))]
    InvalidParams(Vec<Violation>),

    #[error("invalid scenario: {}", join(.0))]
    InvalidScenario(Vec<Violation>),

    #[error("{what}: expected length {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("single-track model requires v >= {v_min} m/s, got {v}")]
    SpeedBelowMin { v: f64, v_min: f64 },

    #[error("side-slip sensitivity undefined at standstill (v_x = v_y = 0)")]
    Standstill,

    #[error("system matrix is singular")]
    SingularMatrix,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("simulation diverged at t = {t:.6} s (last finite sample at t = {last_valid:.6} s)")]
    Diverged { t: f64, last_valid: f64 },

    #[error("empty sample list")]
    Empty,

    #[error("{0}")]
    Mismatch(String),

    #[error("no sensitivity data in output")]
    MissingSensitivity,

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("config: {0}")]
    Config(#[from] toml::de::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
