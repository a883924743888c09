use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why a contest has no meaningful win probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UndefinedReason {
    /// Every winning percentage is 0, so nobody can ever win a round.
    AllZero,
    /// Two or more competitors have a winning percentage of 1.
    MultipleCertain,
}

impl fmt::Display for UndefinedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UndefinedReason::AllZero => f.write_str("all winning percentages are 0"),
            UndefinedReason::MultipleCertain => {
                f.write_str("at least two winning percentages are 1")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    #[error("winning percentage {0} is outside [0, 1]")]
    InvalidPercentage(f64),
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("strength {0} must be a nonnegative number")]
    NegativeStrength(f64),
    #[error("odds value {0} must be a nonnegative number")]
    NegativeOdds(f64),
    #[error("a contest needs at least one opponent")]
    NoOpponents,
    #[error("probability is undefined: {0}")]
    UndefinedContest(UndefinedReason),
    #[error("{what} must lie strictly between 0 and 1, got {value}")]
    BoundaryPercentage { what: &'static str, value: f64 },
    #[error("degenerate opponent set: {0}")]
    DegenerateOpponents(&'static str),
    #[error("{name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("contests must share the protagonist percentage ({0} vs {1})")]
    ProtagonistMismatch(f64, f64),
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
}
