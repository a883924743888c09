//! Winning percentages, the log5 strength map and the n-opponent James function.
//!
//! A protagonist with winning percentage `a` facing opponents `b_1..b_n` wins
//! with probability
//!
//! ```text
//! P_n(a; b) = q(a) / (q(a) + Σ q(b_i)),    q(s) = s / (1 - s)
//! ```
//!
//! which for a single opponent is the classic log5 formula
//! `a(1-b) / (a(1-b) + b(1-a))`.
//!
//! Evaluation never forms `q(a)` or `q(b_i)` directly. Each opponent instead
//! contributes the ratio `b_i(1-a) / (a(1-b_i))`, all factors of which lie in
//! `[0, 1]`, and the win probability is `1 / (1 + Σ ratios)`. The ratios are
//! sorted and summed pairwise so the result does not depend on the order in
//! which opponents are listed, and zero ratios are dropped so that adding an
//! opponent with percentage 0 leaves the value bit-for-bit unchanged.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, UndefinedReason};

/// Relative tolerance used by equality predicates unless the caller picks one.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

macro_rules! unit_interval {
    ($(#[$meta:meta])* $name:ident, $err:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
        #[serde(try_from = "f64", into = "f64")]
        pub struct $name(f64);

        impl $name {
            pub const ZERO: $name = $name(0.0);
            pub const HALF: $name = $name(0.5);
            pub const ONE: $name = $name(1.0);

            pub fn new(value: f64) -> Result<Self> {
                if (0.0..=1.0).contains(&value) {
                    Ok($name(value))
                } else {
                    Err(Error::$err(value))
                }
            }

            #[inline]
            pub const fn value(self) -> f64 {
                self.0
            }

            /// True when the value lies strictly inside `(0, 1)`.
            #[inline]
            pub fn is_interior(self) -> bool {
                self.0 > 0.0 && self.0 < 1.0
            }

            #[inline]
            pub fn complement(self) -> Self {
                $name(1.0 - self.0)
            }
        }

        impl TryFrom<f64> for $name {
            type Error = Error;

            fn try_from(value: f64) -> Result<Self> {
                $name::new(value)
            }
        }

        impl From<$name> for f64 {
            fn from(v: $name) -> f64 {
                v.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&self.0, f)
            }
        }
    };
}

unit_interval!(
    /// A winning percentage in `[0, 1]`, the fraction of pairwise games won.
    WinPct,
    InvalidPercentage
);

unit_interval!(
    /// A probability in `[0, 1]`.
    Probability,
    InvalidProbability
);

impl From<Probability> for WinPct {
    fn from(p: Probability) -> Self {
        WinPct(p.0)
    }
}

impl From<WinPct> for Probability {
    fn from(p: WinPct) -> Self {
        Probability(p.0)
    }
}

/// Log5 odds `s / (1 - s)` of a winning percentage; infinite for `s = 1`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct Strength(f64);

impl Strength {
    pub fn new(value: f64) -> Result<Self> {
        if value >= 0.0 {
            Ok(Strength(value))
        } else {
            Err(Error::NegativeStrength(value))
        }
    }

    #[inline]
    pub const fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

pub fn strength(s: WinPct) -> Strength {
    let s = s.value();
    if s == 1.0 {
        Strength(f64::INFINITY)
    } else {
        Strength(s / (1.0 - s))
    }
}

pub fn strength_inv(q: Strength) -> WinPct {
    let q = q.value();
    if q.is_infinite() {
        WinPct::ONE
    } else {
        WinPct((q / (1.0 + q)).min(1.0))
    }
}

/// One protagonist against a nonempty, ordered list of opponents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contest {
    protagonist: WinPct,
    opponents: Vec<WinPct>,
}

impl Contest {
    pub fn new(protagonist: WinPct, opponents: Vec<WinPct>) -> Result<Self> {
        if opponents.is_empty() {
            return Err(Error::NoOpponents);
        }
        Ok(Contest {
            protagonist,
            opponents,
        })
    }

    /// Builds a contest from raw values, validating every percentage.
    pub fn from_values(protagonist: f64, opponents: &[f64]) -> Result<Self> {
        let opponents = opponents
            .iter()
            .map(|&b| WinPct::new(b))
            .collect::<Result<Vec<_>>>()?;
        Contest::new(WinPct::new(protagonist)?, opponents)
    }

    pub fn protagonist(&self) -> WinPct {
        self.protagonist
    }

    pub fn opponents(&self) -> &[WinPct] {
        &self.opponents
    }

    /// Number of opponents.
    pub fn n(&self) -> usize {
        self.opponents.len()
    }

    /// All competitors, protagonist first.
    pub fn competitors(&self) -> impl Iterator<Item = WinPct> + '_ {
        std::iter::once(self.protagonist).chain(self.opponents.iter().copied())
    }

    /// The same field seen from competitor `index` (0 is the protagonist).
    ///
    /// The new opponent list is the old protagonist followed by the remaining
    /// opponents in their original order.
    pub fn rotate(&self, index: usize) -> Contest {
        if index == 0 {
            return self.clone();
        }
        let mut opponents = Vec::with_capacity(self.opponents.len());
        opponents.push(self.protagonist);
        opponents.extend(
            self.opponents
                .iter()
                .enumerate()
                .filter(|&(i, _)| i + 1 != index)
                .map(|(_, &b)| b),
        );
        Contest {
            protagonist: self.opponents[index - 1],
            opponents,
        }
    }

    pub fn classify(&self) -> ContestClass {
        classify_contest(self)
    }

    pub(crate) fn values(&self) -> (f64, Vec<f64>) {
        (
            self.protagonist.value(),
            self.opponents.iter().map(|b| b.value()).collect(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContestClass {
    Undefined(UndefinedReason),
    /// The protagonist has percentage 1 and no opponent does.
    ForcedWin,
    /// Exactly one opponent has percentage 1 and the protagonist does not.
    ForcedLoss,
    Regular,
}

pub fn classify_contest(c: &Contest) -> ContestClass {
    let certain = c.competitors().filter(|s| s.value() == 1.0).count();
    if certain >= 2 {
        return ContestClass::Undefined(UndefinedReason::MultipleCertain);
    }
    if c.competitors().all(|s| s.value() == 0.0) {
        return ContestClass::Undefined(UndefinedReason::AllZero);
    }
    match (certain, c.protagonist.value() == 1.0) {
        (1, true) => ContestClass::ForcedWin,
        (1, false) => ContestClass::ForcedLoss,
        _ => ContestClass::Regular,
    }
}

/// Ratio `b(1-a) / (a(1-b))` for `a` in `(0, 1)` and `b` in `[0, 1)`.
#[inline]
pub(crate) fn odds_term(a: f64, b: f64) -> f64 {
    (b * (1.0 - a)) / (a * (1.0 - b))
}

/// Order-insensitive sum: zeros dropped, ascending sort, pairwise reduction.
pub(crate) fn stable_sum(mut terms: Vec<f64>) -> f64 {
    terms.retain(|&t| t != 0.0);
    terms.sort_by(f64::total_cmp);
    pairwise_sum(&terms)
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let (lo, hi) = xs.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

/// Win probability for a contest already known to be `Regular`.
fn regular_probability(a: f64, opponents: impl Iterator<Item = f64>) -> Probability {
    if a == 0.0 {
        // Some opponent is positive, otherwise the contest would be undefined.
        return Probability::ZERO;
    }
    let total = stable_sum(opponents.map(|b| odds_term(a, b)).collect());
    Probability((1.0 / (1.0 + total)).clamp(0.0, 1.0))
}

/// Probability that a team with percentage `a` beats one with percentage `b`.
pub fn james_p(a: WinPct, b: WinPct) -> Result<Probability> {
    let (av, bv) = (a.value(), b.value());
    if av == 0.0 && bv == 0.0 {
        return Err(Error::UndefinedContest(UndefinedReason::AllZero));
    }
    if av == 1.0 && bv == 1.0 {
        return Err(Error::UndefinedContest(UndefinedReason::MultipleCertain));
    }
    if av == 1.0 {
        return Ok(Probability::ONE);
    }
    if bv == 1.0 {
        return Ok(Probability::ZERO);
    }
    Ok(regular_probability(av, std::iter::once(bv)))
}

/// Probability that the protagonist beats every opponent at once.
pub fn p_n(c: &Contest) -> Result<Probability> {
    match c.classify() {
        ContestClass::Undefined(reason) => Err(Error::UndefinedContest(reason)),
        ContestClass::ForcedWin => Ok(Probability::ONE),
        ContestClass::ForcedLoss => Ok(Probability::ZERO),
        ContestClass::Regular => Ok(regular_probability(
            c.protagonist.value(),
            c.opponents.iter().map(|b| b.value()),
        )),
    }
}

/// Returns `c = P(a, b)`, which satisfies `P(a, c) = b`.
pub fn involution_partner(a: WinPct, b: WinPct) -> Result<WinPct> {
    if !a.is_interior() {
        return Err(Error::BoundaryPercentage {
            what: "involution base",
            value: a.value(),
        });
    }
    james_p(a, b).map(WinPct::from)
}

/// Finds the protagonist percentage `a` with `P_n(a; opponents) = 1 - c`.
///
/// The defining relation `ac = (1-a)(1-c) Σ q(b_i)` is symmetric in `a` and
/// `c`, so applying this twice returns the starting value.
pub fn solve_protagonist_complement(opponents: &[WinPct], c: WinPct) -> Result<WinPct> {
    if opponents.is_empty() {
        return Err(Error::NoOpponents);
    }
    if opponents.iter().any(|b| b.value() == 1.0) {
        return Err(Error::DegenerateOpponents("an opponent has percentage 1"));
    }
    if opponents.iter().all(|b| b.value() == 0.0) {
        return Err(Error::DegenerateOpponents(
            "every opponent has percentage 0",
        ));
    }
    if !c.is_interior() {
        return Err(Error::BoundaryPercentage {
            what: "complement target",
            value: c.value(),
        });
    }
    let total = stable_sum(opponents.iter().map(|&b| strength(b).value()).collect());
    let c = c.value();
    let a = (1.0 - c) * total / (c + (1.0 - c) * total);
    WinPct::new(a.clamp(0.0, 1.0))
}

/// Maps `s` to `ts / (1 + (t-1)s)`, which multiplies its strength by `t`.
pub fn level_transform(s: WinPct, t: f64) -> Result<WinPct> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "level factor",
            value: t,
        });
    }
    let s = s.value();
    Ok(WinPct((t * s / (1.0 + (t - 1.0) * s)).clamp(0.0, 1.0)))
}

/// True when the opponents' strengths sum to 1, which makes `P_n(a; b) = a`.
pub fn balanced_opposition(opponents: &[WinPct]) -> bool {
    balanced_opposition_with(opponents, DEFAULT_TOLERANCE)
}

pub fn balanced_opposition_with(opponents: &[WinPct], tolerance: f64) -> bool {
    if opponents.iter().any(|b| b.value() == 1.0) {
        return false;
    }
    let total = stable_sum(opponents.iter().map(|&b| strength(b).value()).collect());
    (total - 1.0).abs() <= tolerance
}
