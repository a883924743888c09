//! Alternate routes to `P_n` built from single-opponent probabilities.
//!
//! Every evaluator here follows its own formula with its own arithmetic, so
//! agreement with [`p_n`] is a real check rather than a tautology. They all
//! work with the "reverse odds" `1/P - 1`, which for one opponent equals
//! `P(b, a) / P(a, b)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{james_p, p_n, Contest, ContestClass, Probability, WinPct};

/// A nonnegative reverse-odds value `1/P - 1`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct OddsValue(f64);

impl OddsValue {
    pub fn new(value: f64) -> Result<Self> {
        if value >= 0.0 {
            Ok(OddsValue(value))
        } else {
            Err(Error::NegativeOdds(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn to_probability(self) -> Probability {
        Probability::new((1.0 / (1.0 + self.0)).clamp(0.0, 1.0)).expect("clamped")
    }
}

/// Disjoint, nonempty blocks of opponent indices covering `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Blocks use zero-based opponent indices.
    pub fn new(blocks: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &i in block {
                match seen.get_mut(i) {
                    None => {
                        return Err(Error::InvalidPartition(format!(
                            "index {} is out of range for {n} opponents",
                            i + 1
                        )))
                    }
                    Some(true) => {
                        return Err(Error::InvalidPartition(format!(
                            "index {} appears twice",
                            i + 1
                        )))
                    }
                    Some(flag) => *flag = true,
                }
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidPartition(format!(
                "index {} is not covered",
                missing + 1
            )));
        }
        Ok(Partition { blocks })
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            blocks: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn whole(n: usize) -> Self {
        Partition {
            blocks: vec![(0..n).collect()],
        }
    }

    /// First `ceil(n/2)` opponents, then the rest.
    pub fn halves(n: usize) -> Self {
        let mid = n.div_ceil(2);
        let mut blocks = vec![(0..mid).collect::<Vec<_>>()];
        if mid < n {
            blocks.push((mid..n).collect());
        }
        Partition { blocks }
    }

    /// Parses one-based blocks such as `"1,2;3"`.
    pub fn parse_one_based(spec: &str, n: usize) -> Result<Self> {
        let blocks = spec
            .split(';')
            .map(|block| {
                block
                    .split(',')
                    .map(|tok| {
                        let tok = tok.trim();
                        tok.parse::<usize>()
                            .ok()
                            .filter(|&i| i >= 1)
                            .map(|i| i - 1)
                            .ok_or_else(|| Error::InvalidPartition(format!("bad index `{tok}`")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(blocks, n)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of opponents covered.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

fn interior(what: &'static str, s: f64) -> Result<f64> {
    if s > 0.0 && s < 1.0 {
        Ok(s)
    } else {
        Err(Error::BoundaryPercentage { what, value: s })
    }
}

fn require_interior(c: &Contest) -> Result<(f64, Vec<f64>)> {
    let (a, b) = c.values();
    interior("protagonist", a)?;
    for &x in &b {
        interior("opponent", x)?;
    }
    Ok((a, b))
}

fn pct(v: f64) -> WinPct {
    WinPct::new(v).expect("validated percentage")
}

/// `1/P(x, y) - 1` for interior `x` and `y` in `[0, 1)`.
fn reverse_odds(x: f64, y: f64) -> f64 {
    let p = james_p(pct(x), pct(y)).expect("defined for interior first argument");
    1.0 / p.value() - 1.0
}

fn from_reverse_odds(odds: f64) -> Probability {
    OddsValue(odds).to_probability()
}

/// Evaluates the product representation
/// `a Π(1-b_i) / (a Π(1-b_i) + Σ_j b_j (1-a) Π_{i≠j} (1-b_i))` literally.
///
/// The literal form already gives 1 or 0 when exactly one percentage is 1.
pub fn p_n_product_form(c: &Contest) -> Result<Probability> {
    if let ContestClass::Undefined(reason) = c.classify() {
        return Err(Error::UndefinedContest(reason));
    }
    let (a, b) = c.values();
    let n = b.len();
    let mut prefix = vec![1.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] * (1.0 - b[i]);
    }
    let mut suffix = vec![1.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] * (1.0 - b[i]);
    }
    let numerator = a * prefix[n];
    let others: f64 = (0..n)
        .map(|j| b[j] * (1.0 - a) * prefix[j] * suffix[j + 1])
        .sum();
    Probability::new((numerator / (numerator + others)).clamp(0.0, 1.0))
}

/// `Σ_i (1/P(a, b_i) - 1)`, which equals `1/P_n - 1`.
pub fn odds_from_sum(c: &Contest) -> Result<OddsValue> {
    let (a, b) = require_interior(c)?;
    Ok(OddsValue(b.iter().map(|&x| reverse_odds(a, x)).sum()))
}

pub fn p_n_sum(c: &Contest) -> Result<Probability> {
    odds_from_sum(c).map(OddsValue::to_probability)
}

/// Re-expresses the contest through a pivot competitor `c`:
/// `1/P_n(a; b) - 1 = (1/P(a, c) - 1)(1/P_n(c; b) - 1)`.
pub fn p_n_substitution(c: &Contest, pivot: WinPct) -> Result<Probability> {
    let (a, b) = require_interior(c)?;
    let pivot = interior("pivot", pivot.value())?;
    let through_pivot = p_n(&Contest::from_values(pivot, &b)?)?;
    let odds = reverse_odds(a, pivot) * (1.0 / through_pivot.value() - 1.0);
    Ok(from_reverse_odds(odds))
}

/// Sums the reverse odds of the sub-contests formed by each block.
pub fn p_n_partitioned(c: &Contest, parts: &Partition) -> Result<Probability> {
    let (a, b) = require_interior(c)?;
    if parts.len() != b.len() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} opponents, contest has {}",
            parts.len(),
            b.len()
        )));
    }
    let mut odds = 0.0;
    for block in parts.blocks() {
        let sub: Vec<f64> = block.iter().map(|&i| b[i]).collect();
        let p = p_n(&Contest::from_values(a, &sub)?)?;
        odds += 1.0 / p.value() - 1.0;
    }
    Ok(from_reverse_odds(odds))
}

/// Peels opponents off one at a time:
/// `1/P_n(a; b) - 1 = (1/P(a, b_1) - 1) / P_{n-1}(b_1; b_2..b_n)`, `P_0 = 1`.
///
/// Opponents after the first may be 0. A zero opponent that would become the
/// leading opponent of an inner contest is dropped, since it can never win.
pub fn p_n_reduction(c: &Contest) -> Result<Probability> {
    let (a, b) = c.values();
    interior("protagonist", a)?;
    interior("first opponent", b[0])?;
    for &x in &b[1..] {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::BoundaryPercentage {
                what: "opponent",
                value: x,
            });
        }
    }
    // Chain a, b_1, then the remaining nonzero opponents in order.
    let chain: Vec<f64> = std::iter::once(a)
        .chain(std::iter::once(b[0]))
        .chain(b[1..].iter().copied().filter(|&x| x > 0.0))
        .collect();
    // Innermost first: odds(z_{j-1}; z_j..) = lead_j * (1 + odds(z_j; z_{j+1}..)).
    let mut odds = 0.0;
    for pair in chain.windows(2).rev() {
        odds = reverse_odds(pair[0], pair[1]) * (1.0 + odds);
    }
    Ok(from_reverse_odds(odds))
}

/// `1/P_n - 1 = (1/P(a, b_1) - 1)(1 + Σ_{i≥2} (1/P(b_1, b_i) - 1))`.
pub fn p_n_shifted_sum(c: &Contest) -> Result<Probability> {
    let (a, b) = require_interior(c)?;
    let head = b[0];
    let tail: f64 = b[1..].iter().map(|&x| reverse_odds(head, x)).sum();
    Ok(from_reverse_odds(reverse_odds(a, head) * (1.0 + tail)))
}

/// `1/P_n - 1 = Σ_j Π_{i≤j} (1/P(b_{i-1}, b_i) - 1)` with `b_0 = a`.
pub fn p_n_expanded_sum(c: &Contest) -> Result<Probability> {
    let (a, b) = require_interior(c)?;
    let mut prev = a;
    let mut product = 1.0;
    let mut odds = 0.0;
    for &x in &b {
        product *= reverse_odds(prev, x);
        odds += product;
        prev = x;
    }
    Ok(from_reverse_odds(odds))
}

/// Computes `P_m(b; a, d)` from `P_n(a; b, c)`:
///
/// ```text
/// P_m(b; a, d) = (1 - P_n(a; b, c)) / (1 + (1/(δ₁δ₂) - 1) P_n(a; b, c))
/// δ₁ = P_{n-1}(b; c),  δ₂ = P_{m-1}(a; d),  P_0 = 1
/// ```
pub fn distorted_difference(
    b: WinPct,
    a: WinPct,
    c_rest: &[WinPct],
    d_rest: &[WinPct],
) -> Result<Probability> {
    interior("b", b.value())?;
    interior("a", a.value())?;
    for s in c_rest.iter().chain(d_rest) {
        interior("rest", s.value())?;
    }
    let sub = |head: WinPct, rest: &[WinPct]| -> Result<f64> {
        if rest.is_empty() {
            Ok(1.0)
        } else {
            Ok(p_n(&Contest::new(head, rest.to_vec())?)?.value())
        }
    };
    let delta1 = sub(b, c_rest)?;
    let delta2 = sub(a, d_rest)?;
    let mut opponents = Vec::with_capacity(c_rest.len() + 1);
    opponents.push(b);
    opponents.extend_from_slice(c_rest);
    let forward = p_n(&Contest::new(a, opponents)?)?.value();
    let value = (1.0 - forward) / (1.0 + (1.0 / (delta1 * delta2) - 1.0) * forward);
    Probability::new(value.clamp(0.0, 1.0))
}

/// Odds of `first` divided by odds of `second`, for the same protagonist.
///
/// Equals `Σ q(second's opponents) / Σ q(first's opponents)` whatever the
/// shared protagonist percentage is.
pub fn odds_ratio(first: &Contest, second: &Contest) -> Result<f64> {
    let (a1, _) = require_interior(first)?;
    let (a2, _) = require_interior(second)?;
    if a1 != a2 {
        return Err(Error::ProtagonistMismatch(a1, a2));
    }
    let p1 = p_n(first)?.value();
    let p2 = p_n(second)?.value();
    Ok((p1 * (1.0 - p2)) / ((1.0 - p1) * p2))
}

/// `P_n(b; a, shared) / P_n(a; b, shared)`, which equals `q(b)/q(a)` for
/// every choice of the shared opponents.
pub fn iia_ratio(a: WinPct, b: WinPct, shared: &[WinPct]) -> Result<f64> {
    interior("a", a.value())?;
    interior("b", b.value())?;
    for s in shared {
        if s.value() >= 1.0 {
            return Err(Error::BoundaryPercentage {
                what: "shared opponent",
                value: s.value(),
            });
        }
    }
    let with = |head: WinPct, other: WinPct| -> Result<f64> {
        let mut opponents = vec![other];
        opponents.extend_from_slice(shared);
        Ok(p_n(&Contest::new(head, opponents)?)?.value())
    };
    Ok(with(b, a)? / with(a, b)?)
}

/// A selectable way of computing `P_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    Product,
    Sum,
    Substitution,
    Reduction,
    Shifted,
    Expanded,
    Partition,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Direct,
        Method::Product,
        Method::Sum,
        Method::Substitution,
        Method::Reduction,
        Method::Shifted,
        Method::Expanded,
        Method::Partition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Product => "product",
            Method::Sum => "sum",
            Method::Substitution => "substitution",
            Method::Reduction => "reduction",
            Method::Shifted => "shifted",
            Method::Expanded => "expanded",
            Method::Partition => "partition",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

/// Extra inputs for the substitution and partition methods.
#[derive(Clone, Debug, Default)]
pub struct MethodOptions {
    /// Defaults to 1/2.
    pub pivot: Option<WinPct>,
    /// Defaults to [`Partition::halves`].
    pub partition: Option<Partition>,
}

pub fn evaluate(method: Method, c: &Contest, options: &MethodOptions) -> Result<Probability> {
    match method {
        Method::Direct => p_n(c),
        Method::Product => p_n_product_form(c),
        Method::Sum => p_n_sum(c),
        Method::Substitution => p_n_substitution(c, options.pivot.unwrap_or(WinPct::HALF)),
        Method::Reduction => p_n_reduction(c),
        Method::Shifted => p_n_shifted_sum(c),
        Method::Expanded => p_n_expanded_sum(c),
        Method::Partition => match &options.partition {
            Some(parts) => p_n_partitioned(c, parts),
            None => p_n_partitioned(c, &Partition::halves(c.n())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn contest(a: f64, b: &[f64]) -> Contest {
        Contest::from_values(a, b).unwrap()
    }

    fn pct(v: f64) -> WinPct {
        WinPct::new(v).unwrap()
    }

    fn pcts(v: &[f64]) -> Vec<WinPct> {
        v.iter().map(|&x| pct(x)).collect()
    }

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol * x.abs().max(y.abs())
    }

    fn direct(a: f64, b: &[f64]) -> f64 {
        p_n(&contest(a, b)).unwrap().value()
    }

    #[test]
    fn product_form_examples() {
        let v = p_n_product_form(&contest(0.5, &[0.8, 0.5]))
            .unwrap()
            .value();
        assert!(close(v, 1.0 / 6.0, 1e-15));
        let one = p_n_product_form(&contest(0.3, &[0.65])).unwrap().value();
        assert!(close(
            one,
            james_p(pct(0.3), pct(0.65)).unwrap().value(),
            1e-15
        ));
        assert_eq!(
            p_n_product_form(&contest(0.5, &[0.3, 1.0]))
                .unwrap()
                .value(),
            0.0
        );
        assert_eq!(
            p_n_product_form(&contest(1.0, &[0.3, 0.2]))
                .unwrap()
                .value(),
            1.0
        );
        assert!(p_n_product_form(&contest(0.0, &[0.0])).is_err());
    }

    #[test]
    fn sum_examples() {
        assert!(close(
            odds_from_sum(&contest(0.5, &[0.8, 0.5])).unwrap().value(),
            5.0,
            1e-15
        ));
        let a = 0.3;
        assert!(close(
            odds_from_sum(&contest(a, &[0.5])).unwrap().value(),
            (1.0 - a) / a,
            1e-15
        ));
        let third = 1.0 / 3.0;
        assert!(close(
            odds_from_sum(&contest(0.4, &[third, third]))
                .unwrap()
                .value(),
            1.5,
            1e-14
        ));
        assert!(odds_from_sum(&contest(0.4, &[0.0, 0.5])).is_err());
    }

    #[test]
    fn substitution_examples() {
        let c = contest(0.5, &[0.8, 0.5]);
        assert!(close(
            p_n_substitution(&c, pct(0.5)).unwrap().value(),
            1.0 / 6.0,
            1e-15
        ));
        let c = contest(0.37, &[0.8, 0.15, 0.6]);
        assert!(close(
            p_n_substitution(&c, pct(0.37)).unwrap().value(),
            direct(0.37, &[0.8, 0.15, 0.6]),
            1e-14
        ));
        let c = contest(0.6, &[0.5, 0.5]);
        assert!(close(
            p_n_substitution(&c, pct(0.3)).unwrap().value(),
            3.0 / 7.0,
            1e-14
        ));
        assert!(p_n_substitution(&c, pct(1.0)).is_err());
    }

    #[test]
    fn partition_examples() {
        let b = [0.8, 0.5, 0.6];
        let c = contest(0.5, &b);
        let sum = p_n_sum(&c).unwrap().value();
        assert!(close(
            p_n_partitioned(&c, &Partition::singletons(3))
                .unwrap()
                .value(),
            sum,
            1e-15
        ));
        assert!(close(
            p_n_partitioned(&c, &Partition::whole(3)).unwrap().value(),
            direct(0.5, &b),
            1e-15
        ));
        let parts = Partition::parse_one_based("1,2;3", 3).unwrap();
        assert!(close(
            p_n_partitioned(&c, &parts).unwrap().value(),
            direct(0.5, &b),
            1e-14
        ));
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![vec![0], vec![]], 1).is_err());
        assert!(Partition::new(vec![vec![0, 1], vec![1]], 2).is_err());
        assert!(Partition::new(vec![vec![0]], 2).is_err());
        assert!(Partition::new(vec![vec![0, 5]], 2).is_err());
        assert!(Partition::parse_one_based("0,1", 2).is_err());
        assert!(Partition::parse_one_based("1;x", 2).is_err());
        assert_eq!(Partition::halves(5).blocks(), &[vec![0, 1, 2], vec![3, 4]]);
        assert_eq!(Partition::halves(1).blocks(), &[vec![0]]);
        let c = contest(0.5, &[0.2, 0.3]);
        assert!(p_n_partitioned(&c, &Partition::whole(3)).is_err());
    }

    #[test]
    fn reduction_examples() {
        let one = p_n_reduction(&contest(0.3, &[0.7])).unwrap().value();
        assert!(close(
            1.0 / one - 1.0,
            1.0 / james_p(pct(0.3), pct(0.7)).unwrap().value() - 1.0,
            1e-14
        ));
        assert!(close(
            p_n_reduction(&contest(0.5, &[0.5, 0.5])).unwrap().value(),
            1.0 / 3.0,
            1e-15
        ));
        let with_zero = p_n_reduction(&contest(0.5, &[0.6, 0.0])).unwrap().value();
        assert!(close(
            with_zero,
            james_p(pct(0.5), pct(0.6)).unwrap().value(),
            1e-15
        ));
        let zeros_inside = p_n_reduction(&contest(0.45, &[0.6, 0.0, 0.3, 0.0, 0.8]))
            .unwrap()
            .value();
        assert!(close(zeros_inside, direct(0.45, &[0.6, 0.3, 0.8]), 1e-14));
        assert!(p_n_reduction(&contest(0.5, &[0.0, 0.6])).is_err());
        assert!(p_n_reduction(&contest(0.5, &[0.3, 1.0])).is_err());
    }

    #[test]
    fn shifted_examples() {
        let a = 0.42;
        let b1 = 0.61;
        let one = p_n_shifted_sum(&contest(a, &[b1])).unwrap().value();
        assert!(close(1.0 / one - 1.0, reverse_odds(a, b1), 1e-14));
        assert!(close(
            p_n_shifted_sum(&contest(0.5, &[0.5, 0.5])).unwrap().value(),
            1.0 / 3.0,
            1e-15
        ));
        let third = 1.0 / 3.0;
        assert!(close(
            p_n_shifted_sum(&contest(0.4, &[third, third]))
                .unwrap()
                .value(),
            0.4,
            1e-14
        ));
    }

    #[test]
    fn expanded_examples() {
        let c = contest(0.5, &[0.8, 0.5]);
        let p = p_n_expanded_sum(&c).unwrap().value();
        assert!(close(1.0 / p - 1.0, 5.0, 1e-14));
        let one = p_n_expanded_sum(&contest(0.2, &[0.9])).unwrap().value();
        assert!(close(1.0 / one - 1.0, reverse_odds(0.2, 0.9), 1e-14));
        let swapped = p_n_expanded_sum(&contest(0.5, &[0.5, 0.8]))
            .unwrap()
            .value();
        assert!(close(p, swapped, 1e-14));
    }

    #[test]
    fn distorted_difference_examples() {
        let (a, b) = (pct(0.35), pct(0.8));
        let p = distorted_difference(b, a, &[], &[]).unwrap().value();
        assert_eq!(p, 1.0 - james_p(a, b).unwrap().value());
        let half = pct(0.5);
        let v = distorted_difference(half, half, &[half], &[half])
            .unwrap()
            .value();
        assert!(close(v, 1.0 / 3.0, 1e-15));
        assert!(distorted_difference(pct(0.0), a, &[], &[]).is_err());
    }

    #[test]
    fn alternate_condition_c() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a: f64 = rng.random_range(0.05..0.95);
            let b: f64 = rng.random_range(0.05..0.95);
            for m in 1..=3usize {
                for n in 1..=3usize {
                    let c_rest = pcts(&vec![b; n - 1]);
                    let d_rest = pcts(&vec![a; m - 1]);
                    let got = distorted_difference(pct(b), pct(a), &c_rest, &d_rest)
                        .unwrap()
                        .value();
                    let pn = direct(a, &vec![b; n]);
                    let expect = (1.0 - pn) / (1.0 + (m * n - 1) as f64 * pn);
                    assert!(close(got, expect, 1e-12));
                    assert!(close(got, direct(b, &vec![a; m]), 1e-12));
                }
            }
        }
    }

    #[test]
    fn odds_ratio_examples() {
        let c1 = contest(0.3, &[0.8]);
        let c2 = contest(0.3, &[0.5]);
        assert!(close(odds_ratio(&c1, &c2).unwrap(), 0.25, 1e-14));
        assert!(close(odds_ratio(&c1, &c1).unwrap(), 1.0, 1e-15));
        let at =
            |a: f64| odds_ratio(&contest(a, &[0.8, 0.2]), &contest(a, &[0.5, 0.66, 0.1])).unwrap();
        assert!(close(at(0.3), at(0.7), 1e-12));
        assert!(matches!(
            odds_ratio(&c1, &contest(0.4, &[0.5])),
            Err(Error::ProtagonistMismatch(..))
        ));
    }

    #[test]
    fn iia_examples() {
        assert!(close(
            iia_ratio(pct(0.4), pct(0.4), &pcts(&[0.2, 0.9])).unwrap(),
            1.0,
            1e-15
        ));
        assert!(close(
            iia_ratio(pct(0.5), pct(0.8), &pcts(&[0.3])).unwrap(),
            4.0,
            1e-14
        ));
        let bare = iia_ratio(pct(0.5), pct(0.8), &[]).unwrap();
        let crowded = iia_ratio(pct(0.5), pct(0.8), &pcts(&[0.6, 0.7])).unwrap();
        assert!(close(bare, crowded, 1e-12));
        assert!(iia_ratio(pct(0.5), pct(0.8), &pcts(&[1.0])).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn cross_agreement_on_random_contests() {
        let mut rng = ChaCha8Rng::seed_from_u64(2015);
        for _ in 0..1000 {
            let n = rng.random_range(1..=8);
            let a: f64 = rng.random_range(0.05..0.95);
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
            let c = contest(a, &b);
            let pivot = pct(rng.random_range(0.05..0.95));
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let cut = rng.random_range(1..=n);
            let mut blocks = vec![idx[..cut].to_vec()];
            if cut < n {
                blocks.push(idx[cut..].to_vec());
            }
            let opts = MethodOptions {
                pivot: Some(pivot),
                partition: Some(Partition::new(blocks, n).unwrap()),
            };
            let reference = p_n(&c).unwrap().value();
            for m in Method::ALL {
                let v = evaluate(m, &c, &opts).unwrap().value();
                assert!(
                    close(v, reference, 1e-12),
                    "{m}: {v} vs {reference} for {c:?}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn expanded_two_orders_agree(a in 0.05f64..0.95, b1 in 0.05f64..0.95, b2 in 0.05f64..0.95) {
            let x = p_n_expanded_sum(&contest(a, &[b1, b2])).unwrap().value();
            let y = p_n_expanded_sum(&contest(a, &[b2, b1])).unwrap().value();
            prop_assert!(close(x, y, 1e-12));
        }

        #[test]
        fn every_partition_agrees(a in 0.05f64..0.95, b in prop::collection::vec(0.05f64..0.95, 1..7), labels in prop::collection::vec(0usize..4, 7)) {
            let n = b.len();
            let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); 4];
            for i in 0..n {
                blocks[labels[i]].push(i);
            }
            blocks.retain(|bl| !bl.is_empty());
            let parts = Partition::new(blocks, n).unwrap();
            let c = contest(a, &b);
            let v = p_n_partitioned(&c, &parts).unwrap().value();
            prop_assert!(close(v, p_n(&c).unwrap().value(), 1e-12));
        }
    }
}
