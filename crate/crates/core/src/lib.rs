//! Win probabilities for a protagonist facing several opponents at once,
//! computed from each competitor's winning percentage.
//!
//! A competitor with percentage `s` has strength `q(s) = s / (1 - s)`, and the
//! protagonist beats opponents `b_1, ..., b_n` with probability
//! `q(a) / (q(a) + Σ q(b_i))`. With one opponent this is the log5 formula.
//!
//! ```
//! use multijames::{p_n, Contest};
//!
//! let c = Contest::from_values(0.5, &[0.8, 0.5]).unwrap();
//! assert!((p_n(&c).unwrap().value() - 1.0 / 6.0).abs() < 1e-15);
//! ```

pub mod error;
pub mod identities;
pub mod ingest;
pub mod model;
pub mod sim;
pub mod tree;
pub mod verify;

pub use error::{Error, Result, UndefinedReason};
pub use identities::{evaluate, Method, MethodOptions, OddsValue, Partition};
pub use model::{
    balanced_opposition, classify_contest, involution_partner, james_p, level_transform, p_n,
    solve_protagonist_complement, strength, strength_inv, Contest, ContestClass, Probability,
    Strength, WinPct, DEFAULT_TOLERANCE,
};
pub use tree::{
    p_n_from_tree, propagate_percentages, validate_tree, CompetitionGraph, CompetitorId,
    GraphError, PairwiseEdge,
};
