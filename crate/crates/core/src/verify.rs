//! Empirical checks of candidate win-probability families.
//!
//! A candidate family is any evaluator `J_n(a; b_1, ..., b_n)`. The checks
//! sample random contests and measure how far the family is from satisfying
//! the multi-James conditions (A)-(F), the five formulas that single out the
//! canonical family, and plain agreement with [`p_n`].

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::model::{p_n, stable_sum, Contest, ContestClass, DEFAULT_TOLERANCE};

/// Smallest separation between the two `b_1` values in the monotonicity check.
pub const MONOTONE_SEPARATION: f64 = 1e-3;

/// Default tolerance for tabulated families, which are limited by interpolation.
pub const GRID_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("family `{family}` has no table for n = {n}")]
    UnsupportedSize { family: String, n: usize },
    #[error("family returned {0}, outside [0, 1]")]
    OutOfRange(f64),
    #[error("{0}")]
    Model(#[from] crate::error::Error),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum VerifyError {
    #[error("a ratio scale needs at least one outcome")]
    EmptyScale,
    #[error("weight for `{label}` must be positive and finite, got {weight}")]
    NonpositiveWeight { label: String, weight: f64 },
    #[error("outcome `{0}` appears more than once")]
    DuplicateOutcome(String),
    #[error("unknown outcome `{0}`")]
    UnknownOutcome(String),
    #[error("invalid grid table: {0}")]
    InvalidGrid(String),
    #[error("unknown counterexample family `{0}`")]
    UnknownCounterexample(String),
    #[error("invalid sample spec: {0}")]
    InvalidSampleSpec(&'static str),
}

// ---------------------------------------------------------------------------
// Strict utility

/// Positive weights over a set of labelled outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioScale {
    weights: Vec<(String, f64)>,
}

impl RatioScale {
    pub fn new<I, S>(weights: I) -> Result<Self, VerifyError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let weights: Vec<(String, f64)> = weights.into_iter().map(|(l, w)| (l.into(), w)).collect();
        if weights.is_empty() {
            return Err(VerifyError::EmptyScale);
        }
        let mut seen = std::collections::BTreeSet::new();
        for (label, w) in &weights {
            if !(w.is_finite() && *w > 0.0) {
                return Err(VerifyError::NonpositiveWeight {
                    label: label.clone(),
                    weight: *w,
                });
            }
            if !seen.insert(label.as_str()) {
                return Err(VerifyError::DuplicateOutcome(label.clone()));
            }
        }
        Ok(RatioScale { weights })
    }

    pub fn weights(&self) -> &[(String, f64)] {
        &self.weights
    }

    fn total(&self) -> f64 {
        stable_sum(self.weights.iter().map(|(_, w)| *w).collect())
    }

    /// Choice probability of every outcome, in insertion order.
    pub fn distribution(&self) -> Vec<(String, f64)> {
        let total = self.total();
        self.weights
            .iter()
            .map(|(l, w)| (l.clone(), w / total))
            .collect()
    }
}

/// Probability `v(x) / Σ v(y)` that `outcome` is chosen.
pub fn strict_utility(scale: &RatioScale, outcome: &str) -> Result<f64, VerifyError> {
    let w = scale
        .weights
        .iter()
        .find(|(l, _)| l == outcome)
        .map(|(_, w)| *w)
        .ok_or_else(|| VerifyError::UnknownOutcome(outcome.to_string()))?;
    Ok(w / scale.total())
}

// ---------------------------------------------------------------------------
// Families

/// A family of functions `J_n(a; b_1, ..., b_n)` for `n >= 1`.
pub trait CandidateFamily: Sync {
    fn name(&self) -> String;

    fn evaluate(&self, a: f64, opponents: &[f64]) -> Result<f64, EvalError>;

    /// Opponent counts the family can evaluate, if limited.
    fn supported_sizes(&self) -> Option<Vec<usize>> {
        None
    }
}

/// The family `P_n` itself.
#[derive(Clone, Copy, Debug, Default)]
pub struct CanonicalFamily;

impl CandidateFamily for CanonicalFamily {
    fn name(&self) -> String {
        "builtin".to_string()
    }

    fn evaluate(&self, a: f64, opponents: &[f64]) -> Result<f64, EvalError> {
        let c = Contest::from_values(a, opponents)?;
        Ok(p_n(&c)?.value())
    }
}

/// Families that are close to `P_n` but break some of its properties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Counterexample {
    /// `a Π(1-b_i) / (a Π(1-b_i) + (1-a) Π b_i)`: the single-opponent formula
    /// with every opponent multiplied together.
    NaiveProduct,
    /// `P_n` rebuilt on squared odds `q(s)^2`.
    SquaredOdds,
    /// `Π P(a, b_i)`: the protagonist must win every head-to-head match.
    IndependentPairwise,
}

impl Counterexample {
    pub const ALL: [Counterexample; 3] = [
        Counterexample::NaiveProduct,
        Counterexample::SquaredOdds,
        Counterexample::IndependentPairwise,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Counterexample::NaiveProduct => "naive-product",
            Counterexample::SquaredOdds => "squared-odds",
            Counterexample::IndependentPairwise => "independent-pairwise",
        }
    }

    /// Checks this family is known to fail under the default sampling.
    pub fn documented_failures(self) -> &'static [&'static str] {
        match self {
            // Reverse odds are Π q(b_i) / q(a): substitution and odds-ratio
            // independence hold, but the sum formula does not.
            Counterexample::NaiveProduct => &[
                check::A,
                check::B,
                check::C,
                check::D,
                check::SUM,
                check::REDUCTION,
                check::IIA,
                check::CANONICAL,
            ],
            // Every formula holds; only the fixed point (A) pins down the odds.
            Counterexample::SquaredOdds => &[check::A, check::CANONICAL],
            Counterexample::IndependentPairwise => &[
                check::A,
                check::C,
                check::SUM,
                check::SUBSTITUTION,
                check::REDUCTION,
                check::IIA,
                check::ODDS_RATIO,
                check::CANONICAL,
            ],
        }
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Counterexample {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Counterexample::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| VerifyError::UnknownCounterexample(s.to_string()))
    }
}

fn q(s: f64) -> f64 {
    s / (1.0 - s)
}

fn check_range(x: f64) -> Result<f64, EvalError> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(EvalError::OutOfRange(x))
    }
}

impl CandidateFamily for Counterexample {
    fn name(&self) -> String {
        format!("counterexample:{}", self.label())
    }

    fn evaluate(&self, a: f64, opponents: &[f64]) -> Result<f64, EvalError> {
        // Validates the inputs and screens out undefined contests.
        let c = Contest::from_values(a, opponents)?;
        if let ContestClass::Undefined(reason) = c.classify() {
            return Err(crate::error::Error::UndefinedContest(reason).into());
        }
        let value = match self {
            Counterexample::NaiveProduct => {
                let win: f64 = a * opponents.iter().map(|b| 1.0 - b).product::<f64>();
                let lose: f64 = (1.0 - a) * opponents.iter().product::<f64>();
                if win + lose == 0.0 {
                    0.5
                } else {
                    win / (win + lose)
                }
            }
            Counterexample::SquaredOdds => {
                if a == 1.0 {
                    1.0
                } else if opponents.contains(&1.0) {
                    0.0
                } else {
                    let qa = q(a).powi(2);
                    let rest: f64 = opponents.iter().map(|&b| q(b).powi(2)).sum();
                    qa / (qa + rest)
                }
            }
            Counterexample::IndependentPairwise => {
                let mut prod = 1.0;
                for &b in opponents {
                    prod *= CanonicalFamily.evaluate(a, &[b])?;
                }
                prod
            }
        };
        check_range(value)
    }
}

/// One tabulated `J_n` over a rectangular grid.
///
/// `axes[0]` is the protagonist axis and `axes[i]` the axis of `b_i`.
/// `values` is row-major with the last axis varying fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridTable {
    pub n: usize,
    pub axes: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl GridTable {
    pub fn validate(&self) -> Result<(), VerifyError> {
        let bad = |m: String| Err(VerifyError::InvalidGrid(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.axes.len() != self.n + 1 {
            return bad(format!(
                "table for n = {} needs {} axes, found {}",
                self.n,
                self.n + 1,
                self.axes.len()
            ));
        }
        let mut expected = 1usize;
        for (i, axis) in self.axes.iter().enumerate() {
            if axis.len() < 2 {
                return bad(format!("axis {i} needs at least 2 points"));
            }
            if axis.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return bad(format!("axis {i} has a point outside [0, 1]"));
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("axis {i} is not strictly increasing"));
            }
            expected = expected.saturating_mul(axis.len());
        }
        if self.values.len() != expected {
            return bad(format!(
                "table for n = {} needs {} values, found {}",
                self.n,
                expected,
                self.values.len()
            ));
        }
        if let Some(v) = self.values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return bad(format!("value {v} is outside [0, 1]"));
        }
        Ok(())
    }

    /// Multilinear interpolation, clamping each coordinate to its axis.
    pub fn interpolate(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.axes.len());
        let dims = self.axes.len();
        let mut lower = Vec::with_capacity(dims);
        let mut frac = Vec::with_capacity(dims);
        for (axis, &x) in self.axes.iter().zip(point) {
            let last = axis.len() - 1;
            let x = x.clamp(axis[0], axis[last]);
            let i = axis.partition_point(|&t| t <= x).clamp(1, last) - 1;
            lower.push(i);
            frac.push((x - axis[i]) / (axis[i + 1] - axis[i]));
        }
        let mut strides = vec![1usize; dims];
        for d in (0..dims - 1).rev() {
            strides[d] = strides[d + 1] * self.axes[d + 1].len();
        }
        let mut total = 0.0;
        for corner in 0u32..(1 << dims) {
            let mut weight = 1.0;
            let mut index = 0;
            for d in 0..dims {
                let up = corner & (1 << d) != 0;
                weight *= if up { frac[d] } else { 1.0 - frac[d] };
                index += (lower[d] + usize::from(up)) * strides[d];
            }
            if weight != 0.0 {
                total += weight * self.values[index];
            }
        }
        total.clamp(0.0, 1.0)
    }
}

/// Builds a table by evaluating `family` at every grid node.
///
/// Nodes where the family fails (undefined contests) are filled with 0.5.
pub fn tabulate(family: &dyn CandidateFamily, n: usize, axis: &[f64]) -> GridTable {
    let dims = n + 1;
    let len = axis.len();
    let total = len.pow(dims as u32);
    let mut values = Vec::with_capacity(total);
    let mut point = vec![0.0; dims];
    for flat in 0..total {
        let mut rem = flat;
        for d in (0..dims).rev() {
            point[d] = axis[rem % len];
            rem /= len;
        }
        values.push(family.evaluate(point[0], &point[1..]).unwrap_or(0.5));
    }
    GridTable {
        n,
        axes: vec![axis.to_vec(); dims],
        values,
    }
}

/// `points` evenly spaced values covering [0, 1].
pub fn uniform_axis(points: usize) -> Vec<f64> {
    assert!(points >= 2);
    (0..points)
        .map(|i| i as f64 / (points - 1) as f64)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    pub tables: Vec<GridTable>,
}

/// A family defined by tabulated values for a few opponent counts.
#[derive(Clone, Debug)]
pub struct GridFamily {
    name: String,
    tables: Vec<GridTable>,
}

impl GridFamily {
    pub fn new(name: impl Into<String>, file: GridFile) -> Result<Self, VerifyError> {
        let mut tables = file.tables;
        for t in &tables {
            t.validate()?;
        }
        tables.sort_by_key(|t| t.n);
        if tables.windows(2).any(|w| w[0].n == w[1].n) {
            return Err(VerifyError::InvalidGrid(
                "duplicate table for the same n".into(),
            ));
        }
        Ok(GridFamily {
            name: name.into(),
            tables,
        })
    }

    pub fn tables(&self) -> &[GridTable] {
        &self.tables
    }
}

impl CandidateFamily for GridFamily {
    fn name(&self) -> String {
        format!("grid:{}", self.name)
    }

    fn evaluate(&self, a: f64, opponents: &[f64]) -> Result<f64, EvalError> {
        let n = opponents.len();
        let table =
            self.tables
                .iter()
                .find(|t| t.n == n)
                .ok_or_else(|| EvalError::UnsupportedSize {
                    family: self.name(),
                    n,
                })?;
        let mut point = Vec::with_capacity(n + 1);
        point.push(a);
        point.extend_from_slice(opponents);
        Ok(table.interpolate(&point))
    }

    fn supported_sizes(&self) -> Option<Vec<usize>> {
        Some(self.tables.iter().map(|t| t.n).collect())
    }
}

// ---------------------------------------------------------------------------
// Sampling and reports

/// Which contests to sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSpec {
    pub n_min: usize,
    pub n_max: usize,
    /// Sampled contests per opponent count.
    pub points: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Sampled percentages are drawn uniformly from `[lo, hi]`.
    pub lo: f64,
    pub hi: f64,
}

impl SampleSpec {
    pub fn new(
        n_min: usize,
        n_max: usize,
        points: usize,
        seed: u64,
        tolerance: f64,
    ) -> Result<Self, VerifyError> {
        let spec = SampleSpec {
            n_min,
            n_max,
            points,
            seed,
            tolerance,
            lo: 0.05,
            hi: 0.95,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Result<Self, VerifyError> {
        self.lo = lo;
        self.hi = hi;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), VerifyError> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(VerifyError::InvalidSampleSpec("need 1 <= n_min <= n_max"));
        }
        if self.points == 0 {
            return Err(VerifyError::InvalidSampleSpec("points must be at least 1"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(VerifyError::InvalidSampleSpec("tolerance must be positive"));
        }
        if !(0.0 < self.lo && self.lo < self.hi && self.hi < 1.0) {
            return Err(VerifyError::InvalidSampleSpec("need 0 < lo < hi < 1"));
        }
        if self.hi - self.lo <= 2.0 * MONOTONE_SEPARATION {
            return Err(VerifyError::InvalidSampleSpec(
                "sampling range is too narrow",
            ));
        }
        Ok(())
    }

    fn sizes(&self) -> impl Iterator<Item = usize> {
        self.n_min..=self.n_max
    }
}

/// Names of the individual checks.
pub mod check {
    pub const A: &str = "A:balanced-fixed-point";
    pub const B: &str = "B:zero-opponent";
    pub const C: &str = "C:normalization";
    pub const D: &str = "D:complement";
    pub const E: &str = "E:monotone";
    pub const F: &str = "F:permutation";
    pub const SUM: &str = "sum-formula";
    pub const SUBSTITUTION: &str = "substitution-formula";
    pub const REDUCTION: &str = "reduction-formula";
    pub const IIA: &str = "iia";
    pub const ODDS_RATIO: &str = "odds-ratio";
    pub const CANONICAL: &str = "matches-canonical";
}

/// The input that produced a check's largest violation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub a: f64,
    pub opponents: Vec<f64>,
    /// Check-specific extra inputs, such as the pivot `c`.
    pub extra: Vec<f64>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={} b={:?}", self.a, self.opponents)?;
        if !self.extra.is_empty() {
            write!(f, " extra={:?}", self.extra)?;
        }
        if let (Some(l), Some(r)) = (self.lhs, self.rhs) {
            write!(f, " lhs={l} rhs={r}")?;
        }
        Ok(())
    }
}

fn serialize_violation<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub samples: usize,
    #[serde(serialize_with = "serialize_violation")]
    pub max_violation: f64,
    pub worst: Option<Witness>,
    pub tolerance: f64,
    pub passed: bool,
    /// Set when the family could not be evaluated at `worst`.
    pub error: Option<String>,
}

struct Outcome {
    violation: f64,
    lhs: f64,
    rhs: f64,
}

struct Input {
    a: f64,
    opponents: Vec<f64>,
    extra: Vec<f64>,
}

struct Tracker {
    name: &'static str,
    tolerance: f64,
    samples: usize,
    max_violation: f64,
    worst: Option<Witness>,
    error: Option<String>,
}

impl Tracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Tracker {
            name,
            tolerance,
            samples: 0,
            max_violation: 0.0,
            worst: None,
            error: None,
        }
    }

    /// Returns false once the check should stop sampling.
    fn record(&mut self, input: Input, outcome: Result<Outcome, EvalError>) -> bool {
        self.samples += 1;
        match outcome {
            Ok(o) => {
                let v = if o.violation.is_nan() {
                    f64::INFINITY
                } else {
                    o.violation
                };
                if self.worst.is_none() || v > self.max_violation {
                    self.max_violation = v;
                    self.worst = Some(Witness {
                        a: input.a,
                        opponents: input.opponents,
                        extra: input.extra,
                        lhs: Some(o.lhs),
                        rhs: Some(o.rhs),
                    });
                }
                true
            }
            Err(e) => {
                self.max_violation = f64::INFINITY;
                self.error = Some(e.to_string());
                self.worst = Some(Witness {
                    a: input.a,
                    opponents: input.opponents,
                    extra: input.extra,
                    lhs: None,
                    rhs: None,
                });
                false
            }
        }
    }

    fn finish(self) -> CheckReport {
        CheckReport {
            name: self.name,
            samples: self.samples,
            passed: self.error.is_none() && self.max_violation <= self.tolerance,
            max_violation: self.max_violation,
            worst: self.worst,
            tolerance: self.tolerance,
            error: self.error,
        }
    }
}

fn abs_diff(lhs: f64, rhs: f64) -> Outcome {
    Outcome {
        violation: (lhs - rhs).abs(),
        lhs,
        rhs,
    }
}

/// `|lhs - rhs| / max(|lhs|, |rhs|)`, or 0 when both are 0.
fn rel_diff(lhs: f64, rhs: f64) -> Outcome {
    let scale = lhs.abs().max(rhs.abs());
    let violation = if lhs == rhs {
        0.0
    } else if scale == 0.0 || !scale.is_finite() {
        f64::INFINITY
    } else {
        (lhs - rhs).abs() / scale
    };
    Outcome {
        violation,
        lhs,
        rhs,
    }
}

/// Runs `points` samples per opponent count in the spec.
///
/// Each check draws from its own ChaCha8 stream so adding or reordering
/// checks leaves the others unchanged.
fn run_check<F>(
    name: &'static str,
    stream: u64,
    spec: &SampleSpec,
    min_n: usize,
    mut sample: F,
) -> CheckReport
where
    F: FnMut(&mut Sampler, usize) -> (Input, Result<Outcome, EvalError>),
{
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(stream);
    let mut sampler = Sampler {
        rng,
        lo: spec.lo,
        hi: spec.hi,
    };
    let mut tracker = Tracker::new(name, spec.tolerance);
    'outer: for n in spec.sizes().filter(|&n| n >= min_n) {
        for _ in 0..spec.points {
            let (input, outcome) = sample(&mut sampler, n);
            if !tracker.record(input, outcome) {
                break 'outer;
            }
        }
    }
    tracker.finish()
}

struct Sampler {
    rng: ChaCha8Rng,
    lo: f64,
    hi: f64,
}

impl Sampler {
    fn pct(&mut self) -> f64 {
        self.rng.random_range(self.lo..=self.hi)
    }

    fn pcts(&mut self, k: usize) -> Vec<f64> {
        (0..k).map(|_| self.pct()).collect()
    }

    /// Two percentages at least [`MONOTONE_SEPARATION`] apart, smaller first.
    fn ordered_pair(&mut self) -> (f64, f64) {
        loop {
            let (x, y) = (self.pct(), self.pct());
            if (x - y).abs() >= MONOTONE_SEPARATION {
                return (x.min(y), x.max(y));
            }
        }
    }
}

fn input(a: f64, opponents: &[f64], extra: Vec<f64>) -> Input {
    Input {
        a,
        opponents: opponents.to_vec(),
        extra,
    }
}

fn with_zero(b: &[f64]) -> Vec<f64> {
    let mut v = b.to_vec();
    v.push(0.0);
    v
}

/// Opponents of competitor `i` when the field is `a, b_1, ..., b_n`.
fn rotation(a: f64, b: &[f64], i: usize) -> (f64, Vec<f64>) {
    let mut rest = Vec::with_capacity(b.len());
    rest.push(a);
    rest.extend(
        b.iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &x)| x),
    );
    (b[i], rest)
}

/// Checks the six multi-James conditions (A)-(F).
pub fn check_conditions(f: &dyn CandidateFamily, spec: &SampleSpec) -> Vec<CheckReport> {
    let a_report = run_check(check::A, 0, spec, 1, |s, n| {
        let a = s.pct();
        let b = vec![1.0 / (n as f64 + 1.0); n];
        let out = f.evaluate(a, &b).map(|j| abs_diff(j, a));
        (input(a, &b, vec![]), out)
    });

    let b_report = run_check(check::B, 1, spec, 2, |s, n| {
        let a = s.pct();
        let b = s.pcts(n - 1);
        let out = (|| Ok(abs_diff(f.evaluate(a, &with_zero(&b))?, f.evaluate(a, &b)?)))();
        (input(a, &with_zero(&b), vec![]), out)
    });

    let c_report = run_check(check::C, 2, spec, 1, |s, n| {
        let a = s.pct();
        let b = s.pcts(n);
        let out = (|| {
            let mut terms = vec![f.evaluate(a, &b)?];
            for i in 0..n {
                let (x, rest) = rotation(a, &b, i);
                terms.push(f.evaluate(x, &rest)?);
            }
            Ok(abs_diff(stable_sum(terms), 1.0))
        })();
        (input(a, &b, vec![]), out)
    });

    let d_report = run_check(check::D, 3, spec, 1, |s, n| {
        let (a, b) = (s.pct(), s.pct());
        let k = s.rng.random_range(1..=n);
        let mut lhs_opp = vec![1.0 - b; k - 1];
        lhs_opp.extend(std::iter::repeat_n(1.0 - a, n + 1 - k));
        let mut rhs_opp = vec![a; k - 1];
        rhs_opp.extend(std::iter::repeat_n(b, n + 1 - k));
        let out = (|| {
            Ok(abs_diff(
                f.evaluate(1.0 - b, &lhs_opp)?,
                f.evaluate(a, &rhs_opp)?,
            ))
        })();
        (input(a, &rhs_opp, vec![b, k as f64]), out)
    });

    let e_report = run_check(check::E, 4, spec, 1, |s, n| {
        let a = s.pct();
        let (low, high) = s.ordered_pair();
        let rest = s.pcts(n - 1);
        let mut b_low = vec![low];
        b_low.extend(&rest);
        let mut b_high = vec![high];
        b_high.extend(&rest);
        let out = (|| {
            let at_low = f.evaluate(a, &b_low)?;
            let at_high = f.evaluate(a, &b_high)?;
            // Strict decrease has no tolerance: any tie or increase fails.
            let violation = if at_high < at_low { 0.0 } else { f64::INFINITY };
            Ok(Outcome {
                violation,
                lhs: at_low,
                rhs: at_high,
            })
        })();
        (input(a, &b_low, vec![high]), out)
    });

    let f_report = run_check(check::F, 5, spec, 1, |s, n| {
        let a = s.pct();
        let b = s.pcts(n);
        let mut shuffled = b.clone();
        shuffled.shuffle(&mut s.rng);
        let out = (|| Ok(abs_diff(f.evaluate(a, &b)?, f.evaluate(a, &shuffled)?)))();
        (input(a, &b, shuffled), out)
    });

    vec![a_report, b_report, c_report, d_report, e_report, f_report]
}

/// `1/x - 1`.
fn reverse_odds(x: f64) -> f64 {
    1.0 / x - 1.0
}

/// `J(y, x) / J(x, y)` built from the family's own single-opponent member.
fn pair_ratio(f: &dyn CandidateFamily, x: f64, y: f64) -> Result<f64, EvalError> {
    Ok(f.evaluate(y, &[x])? / f.evaluate(x, &[y])?)
}

/// Checks the five properties that each force a family to equal `P_n`.
///
/// Every right-hand side is built from the family's own `J_1`. Violations
/// are relative, since the reverse odds are unbounded.
pub fn check_uniqueness_properties(f: &dyn CandidateFamily, spec: &SampleSpec) -> Vec<CheckReport> {
    let sum = run_check(check::SUM, 10, spec, 1, |s, n| {
        let a = s.pct();
        let b = s.pcts(n);
        let out = (|| {
            let lhs = reverse_odds(f.evaluate(a, &b)?);
            let mut terms = Vec::with_capacity(n);
            for &bi in &b {
                terms.push(pair_ratio(f, a, bi)?);
            }
            Ok(rel_diff(lhs, stable_sum(terms)))
        })();
        (input(a, &b, vec![]), out)
    });

    let substitution = run_check(check::SUBSTITUTION, 11, spec, 1, |s, n| {
        let (a, c) = (s.pct(), s.pct());
        let b = s.pcts(n);
        let out = (|| {
            let lhs = reverse_odds(f.evaluate(a, &b)?);
            let rhs = pair_ratio(f, a, c)? * reverse_odds(f.evaluate(c, &b)?);
            Ok(rel_diff(lhs, rhs))
        })();
        (input(a, &b, vec![c]), out)
    });

    let reduction = run_check(check::REDUCTION, 12, spec, 2, |s, n| {
        let a = s.pct();
        let b = s.pcts(n);
        let out = (|| {
            let lhs = reverse_odds(f.evaluate(a, &b)?);
            let rhs = pair_ratio(f, a, b[0])? / f.evaluate(b[0], &b[1..])?;
            Ok(rel_diff(lhs, rhs))
        })();
        (input(a, &b, vec![]), out)
    });

    let iia = run_check(check::IIA, 13, spec, 1, |s, n| {
        let (a, b) = (s.pct(), s.pct());
        let shared = s.pcts(n - 1);
        let mut against_b = vec![b];
        against_b.extend(&shared);
        let mut against_a = vec![a];
        against_a.extend(&shared);
        let out = (|| {
            let lhs = f.evaluate(b, &against_a)? / f.evaluate(a, &against_b)?;
            Ok(rel_diff(lhs, pair_ratio(f, a, b)?))
        })();
        (input(a, &against_b, vec![]), out)
    });

    let odds_ratio = run_check(check::ODDS_RATIO, 14, spec, 1, |s, n| {
        let (a, a2) = (s.pct(), s.pct());
        let m = s.rng.random_range(spec.n_min..=spec.n_max);
        let c = s.pcts(m);
        let b = s.pcts(n);
        let ratio = |x: f64| -> Result<f64, EvalError> {
            let jm = f.evaluate(x, &c)?;
            let jn = f.evaluate(x, &b)?;
            Ok(jm * (1.0 - jn) / ((1.0 - jm) * jn))
        };
        let out = (|| Ok(rel_diff(ratio(a)?, ratio(a2)?)))();
        let mut extra = vec![a2];
        extra.extend(&c);
        (input(a, &b, extra), out)
    });

    vec![sum, substitution, reduction, iia, odds_ratio]
}

/// Largest `|J_n - P_n|` over the sample.
pub fn check_matches_canonical(f: &dyn CandidateFamily, spec: &SampleSpec) -> CheckReport {
    run_check(check::CANONICAL, 20, spec, 1, |s, n| {
        let a = s.pct();
        let b = s.pcts(n);
        let out = (|| {
            Ok(abs_diff(
                f.evaluate(a, &b)?,
                CanonicalFamily.evaluate(a, &b)?,
            ))
        })();
        (input(a, &b, vec![]), out)
    })
}

/// Every check, in a fixed order.
pub fn check_all(f: &dyn CandidateFamily, spec: &SampleSpec) -> Vec<CheckReport> {
    let mut reports = check_conditions(f, spec);
    reports.extend(check_uniqueness_properties(f, spec));
    reports.push(check_matches_canonical(f, spec));
    reports
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            n_min: 1,
            n_max: 4,
            points: 200,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
            lo: 0.05,
            hi: 0.95,
        }
    }
}
