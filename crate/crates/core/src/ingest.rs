//! Turning finishing orders into pairwise records and winning percentages.
//!
//! An event with `k` competitors counts as `C(k, 2)` head-to-head games: each
//! competitor beats everyone who finished behind it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Contest, WinPct};
use crate::tree::CompetitorId;

/// A competitor with more than this many times another's games triggers a
/// schedule-balance warning.
pub const IMBALANCE_RATIO: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("event `{event_id}` has {count} competitor(s); at least 2 are needed")]
    TooFewCompetitors { event_id: String, count: usize },
    #[error("event `{event_id}` has tied rank {rank}; rerun with the half-win ties policy to allow ties")]
    TiedRanks { event_id: String, rank: u32 },
    #[error("event `{event_id}` has malformed ranks: {detail}")]
    MalformedRanks { event_id: String, detail: String },
    #[error("event `{event_id}` lists `{competitor}` more than once")]
    DuplicateCompetitor {
        event_id: String,
        competitor: String,
    },
    #[error("unknown competitor `{0}`")]
    UnknownCompetitor(String),
    #[error("competitor `{0}` has no games, so its winning percentage is undefined")]
    NoGames(String),
    #[error("a contest needs at least one opponent")]
    NoOpponents,
    #[error("unknown ties policy `{0}` (expected `reject` or `half`)")]
    UnknownTiesPolicy(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiesPolicy {
    /// Any shared rank is an error.
    #[default]
    Reject,
    /// Tied competitors split their game, half a win each.
    Half,
}

impl fmt::Display for TiesPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TiesPolicy::Reject => "reject",
            TiesPolicy::Half => "half",
        })
    }
}

impl FromStr for TiesPolicy {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reject" => Ok(TiesPolicy::Reject),
            "half" => Ok(TiesPolicy::Half),
            other => Err(IngestError::UnknownTiesPolicy(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub competitor: CompetitorId,
    /// 1 is first place.
    pub rank: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventRecord {
    pub event_id: String,
    pub placements: Vec<Placement>,
}

impl EventRecord {
    pub fn new(event_id: impl Into<String>, placements: Vec<Placement>) -> Self {
        EventRecord {
            event_id: event_id.into(),
            placements,
        }
    }

    /// Builds an event from `(name, rank)` pairs.
    pub fn from_pairs(
        event_id: impl Into<String>,
        pairs: &[(&str, u32)],
    ) -> Result<Self, crate::tree::GraphError> {
        let placements = pairs
            .iter()
            .map(|&(name, rank)| {
                Ok(Placement {
                    competitor: CompetitorId::new(name)?,
                    rank,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(EventRecord::new(event_id, placements))
    }
}

/// One head-to-head game from an event. `u` finished no worse than `v`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairResult {
    pub u: CompetitorId,
    pub v: CompetitorId,
    /// 1 when `u` finished ahead, 0.5 for a tie.
    pub u_score: f64,
}

fn validate(e: &EventRecord, ties: TiesPolicy) -> Result<(), IngestError> {
    let k = e.placements.len();
    let event_id = || e.event_id.clone();
    if k < 2 {
        return Err(IngestError::TooFewCompetitors {
            event_id: event_id(),
            count: k,
        });
    }
    let mut names = BTreeSet::new();
    for p in &e.placements {
        if !names.insert(&p.competitor) {
            return Err(IngestError::DuplicateCompetitor {
                event_id: event_id(),
                competitor: p.competitor.to_string(),
            });
        }
    }
    let mut ranks: Vec<u32> = e.placements.iter().map(|p| p.rank).collect();
    ranks.sort_unstable();
    if ties == TiesPolicy::Reject {
        if let Some(w) = ranks.windows(2).find(|w| w[0] == w[1]) {
            return Err(IngestError::TiedRanks {
                event_id: event_id(),
                rank: w[0],
            });
        }
    }
    // Ranks must follow competition ranking: a competitor's rank is one more
    // than the number of competitors strictly ahead of it.
    for (i, &r) in ranks.iter().enumerate() {
        let ahead = ranks[..i].iter().filter(|&&x| x < r).count();
        if r as usize != ahead + 1 {
            return Err(IngestError::MalformedRanks {
                event_id: event_id(),
                detail: format!(
                    "expected rank {} for the competitor after {} others, found {r}",
                    ahead + 1,
                    ahead
                ),
            });
        }
    }
    Ok(())
}

/// Splits an event into one result per unordered pair of competitors.
pub fn expand_event(e: &EventRecord, ties: TiesPolicy) -> Result<Vec<PairResult>, IngestError> {
    validate(e, ties)?;
    let mut sorted: Vec<&Placement> = e.placements.iter().collect();
    sorted.sort_by(|x, y| {
        x.rank
            .cmp(&y.rank)
            .then_with(|| x.competitor.cmp(&y.competitor))
    });
    let mut out = Vec::with_capacity(sorted.len() * (sorted.len() - 1) / 2);
    for (i, better) in sorted.iter().enumerate() {
        for worse in &sorted[i + 1..] {
            out.push(PairResult {
                u: better.competitor.clone(),
                v: worse.competitor.clone(),
                u_score: if better.rank == worse.rank { 0.5 } else { 1.0 },
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Record {
    pub wins: f64,
    pub losses: f64,
}

impl Record {
    pub fn games(&self) -> f64 {
        self.wins + self.losses
    }

    /// `wins / games`, or `None` without games.
    pub fn pct(&self) -> Option<WinPct> {
        let games = self.games();
        (games > 0.0).then(|| WinPct::new(self.wins / games).expect("a frequency"))
    }
}

/// Aggregated records across events.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Standings {
    records: BTreeMap<CompetitorId, Record>,
    /// Keyed by `(u, v)` with `u < v`; the value is `(u wins, v wins)`.
    pairwise: BTreeMap<(CompetitorId, CompetitorId), (f64, f64)>,
    ties: TiesPolicy,
    tied_games: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StandingRow {
    pub competitor: CompetitorId,
    pub wins: f64,
    pub losses: f64,
    pub games: f64,
    pub pct: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRow {
    pub u: CompetitorId,
    pub v: CompetitorId,
    pub u_wins: f64,
    pub v_wins: f64,
}

impl Standings {
    fn add(&mut self, r: &PairResult) {
        let v_score = 1.0 - r.u_score;
        let u_rec = self.records.entry(r.u.clone()).or_default();
        u_rec.wins += r.u_score;
        u_rec.losses += v_score;
        let v_rec = self.records.entry(r.v.clone()).or_default();
        v_rec.wins += v_score;
        v_rec.losses += r.u_score;
        if r.u_score == 0.5 {
            self.tied_games += 1.0;
        }
        let (key, scores) = if r.u < r.v {
            ((r.u.clone(), r.v.clone()), (r.u_score, v_score))
        } else {
            ((r.v.clone(), r.u.clone()), (v_score, r.u_score))
        };
        let entry = self.pairwise.entry(key).or_insert((0.0, 0.0));
        entry.0 += scores.0;
        entry.1 += scores.1;
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ties_policy(&self) -> TiesPolicy {
        self.ties
    }

    /// Number of games that ended in a tie under the half-win policy.
    pub fn tied_games(&self) -> f64 {
        self.tied_games
    }

    pub fn record(&self, id: &CompetitorId) -> Option<Record> {
        self.records.get(id).copied()
    }

    pub fn pct(&self, id: &CompetitorId) -> Option<WinPct> {
        self.records.get(id).and_then(Record::pct)
    }

    /// Wins of `u` and of `v` in games between them.
    pub fn head_to_head(&self, u: &CompetitorId, v: &CompetitorId) -> (f64, f64) {
        if u < v {
            self.pairwise
                .get(&(u.clone(), v.clone()))
                .copied()
                .unwrap_or_default()
        } else {
            let (v_wins, u_wins) = self
                .pairwise
                .get(&(v.clone(), u.clone()))
                .copied()
                .unwrap_or_default();
            (u_wins, v_wins)
        }
    }

    pub fn rows(&self) -> Vec<StandingRow> {
        self.records
            .iter()
            .map(|(id, r)| StandingRow {
                competitor: id.clone(),
                wins: r.wins,
                losses: r.losses,
                games: r.games(),
                pct: r.pct().map(WinPct::value),
            })
            .collect()
    }

    pub fn pair_rows(&self) -> Vec<PairRow> {
        self.pairwise
            .iter()
            .map(|((u, v), &(u_wins, v_wins))| PairRow {
                u: u.clone(),
                v: v.clone(),
                u_wins,
                v_wins,
            })
            .collect()
    }

    /// Warnings about schedules too unbalanced for percentages to compare well.
    pub fn warnings(&self) -> Vec<String> {
        let with_games = self.records.iter().filter(|(_, r)| r.games() > 0.0);
        let most = with_games
            .clone()
            .max_by(|x, y| x.1.games().total_cmp(&y.1.games()));
        let least = with_games.min_by(|x, y| x.1.games().total_cmp(&y.1.games()));
        let mut out = Vec::new();
        if let (Some((hi_id, hi)), Some((lo_id, lo))) = (most, least) {
            if hi.games() > IMBALANCE_RATIO * lo.games() {
                out.push(format!(
                    "unbalanced schedules: `{hi_id}` played {} games but `{lo_id}` only {}; percentages may not be comparable",
                    hi.games(),
                    lo.games()
                ));
            }
        }
        if self.tied_games > 0.0 {
            out.push(format!(
                "{} tied game(s) counted as half a win each",
                self.tied_games
            ));
        }
        out
    }

    /// A contest between competitors known to these standings.
    pub fn contest_for(
        &self,
        protagonist: &CompetitorId,
        opponents: &[CompetitorId],
    ) -> Result<Contest, IngestError> {
        let pct = |id: &CompetitorId| -> Result<WinPct, IngestError> {
            let r = self
                .records
                .get(id)
                .ok_or_else(|| IngestError::UnknownCompetitor(id.to_string()))?;
            r.pct().ok_or_else(|| IngestError::NoGames(id.to_string()))
        };
        let a = pct(protagonist)?;
        let b = opponents.iter().map(pct).collect::<Result<Vec<_>, _>>()?;
        Contest::new(a, b).map_err(|_| IngestError::NoOpponents)
    }
}

/// Aggregates every event's pairwise results.
pub fn build_standings(events: &[EventRecord], ties: TiesPolicy) -> Result<Standings, IngestError> {
    let mut s = Standings {
        ties,
        ..Standings::default()
    };
    for e in events {
        for r in expand_event(e, ties)? {
            s.add(&r);
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn id(s: &str) -> CompetitorId {
        CompetitorId::new(s).unwrap()
    }

    fn field(event: &str, k: u32) -> EventRecord {
        let names: Vec<String> = (1..=k).map(|r| format!("c{r}")).collect();
        let pairs: Vec<(&str, u32)> = names.iter().map(String::as_str).zip(1..).collect();
        EventRecord::from_pairs(event, &pairs).unwrap()
    }

    #[test]
    fn third_of_ten() {
        let s = build_standings(&[field("e", 10)], TiesPolicy::Reject).unwrap();
        let r = s.record(&id("c3")).unwrap();
        assert_eq!((r.wins, r.losses), (7.0, 2.0));
        assert_eq!(s.pct(&id("c3")).unwrap().value(), 7.0 / 9.0);
        for rank in 1..=10u32 {
            let pct = s.pct(&id(&format!("c{rank}"))).unwrap().value();
            assert_eq!(pct, f64::from(10 - rank) / 9.0);
        }
    }

    #[test]
    fn two_competitors_one_result() {
        let out = expand_event(&field("e", 2), TiesPolicy::Reject).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].u, id("c1"));
        assert_eq!(out[0].u_score, 1.0);
    }

    #[test]
    fn rank_errors() {
        let tied = EventRecord::from_pairs("t", &[("x", 1), ("y", 1), ("z", 3)]).unwrap();
        assert_eq!(
            expand_event(&tied, TiesPolicy::Reject),
            Err(IngestError::TiedRanks {
                event_id: "t".into(),
                rank: 1
            })
        );
        let gap = EventRecord::from_pairs("g", &[("x", 1), ("y", 3)]).unwrap();
        assert!(matches!(
            expand_event(&gap, TiesPolicy::Reject),
            Err(IngestError::MalformedRanks { .. })
        ));
        let dense = EventRecord::from_pairs("d", &[("x", 1), ("y", 1), ("z", 2)]).unwrap();
        assert!(matches!(
            expand_event(&dense, TiesPolicy::Half),
            Err(IngestError::MalformedRanks { .. })
        ));
        let zero = EventRecord::from_pairs("z", &[("x", 0), ("y", 1)]).unwrap();
        assert!(matches!(
            expand_event(&zero, TiesPolicy::Reject),
            Err(IngestError::MalformedRanks { .. })
        ));
        let dup = EventRecord::from_pairs("u", &[("x", 1), ("x", 2)]).unwrap();
        assert!(matches!(
            expand_event(&dup, TiesPolicy::Reject),
            Err(IngestError::DuplicateCompetitor { .. })
        ));
        let lonely = EventRecord::from_pairs("l", &[("x", 1)]).unwrap();
        assert!(matches!(
            expand_event(&lonely, TiesPolicy::Reject),
            Err(IngestError::TooFewCompetitors { count: 1, .. })
        ));
    }

    #[test]
    fn half_policy_splits_ties() {
        let tied = EventRecord::from_pairs("t", &[("x", 1), ("y", 1), ("z", 3)]).unwrap();
        let s = build_standings(&[tied], TiesPolicy::Half).unwrap();
        assert_eq!(
            s.record(&id("x")).unwrap(),
            Record {
                wins: 1.5,
                losses: 0.5
            }
        );
        assert_eq!(
            s.record(&id("z")).unwrap(),
            Record {
                wins: 0.0,
                losses: 2.0
            }
        );
        assert_eq!(s.head_to_head(&id("y"), &id("x")), (0.5, 0.5));
        assert_eq!(s.tied_games(), 1.0);
        assert!(s.warnings().iter().any(|w| w.contains("tied")));
    }

    #[test]
    fn empty_and_disjoint() {
        let s = build_standings(&[], TiesPolicy::Reject).unwrap();
        assert!(s.is_empty());
        assert!(s.rows().is_empty());

        let a = EventRecord::from_pairs("a", &[("p", 1), ("q", 2)]).unwrap();
        let b = EventRecord::from_pairs("b", &[("r", 2), ("s", 1), ("t", 3)]).unwrap();
        let s = build_standings(&[a, b], TiesPolicy::Reject).unwrap();
        assert_eq!(s.pct(&id("p")).unwrap().value(), 1.0);
        assert_eq!(s.pct(&id("r")).unwrap().value(), 0.5);
        assert_eq!(s.pct(&id("t")).unwrap().value(), 0.0);
        assert_eq!(s.head_to_head(&id("s"), &id("r")), (1.0, 0.0));
        assert_eq!(s.head_to_head(&id("p"), &id("t")), (0.0, 0.0));
    }

    #[test]
    fn imbalance_warning() {
        let mut events =
            vec![EventRecord::from_pairs("small", &[("rare", 1), ("busy", 2)]).unwrap()];
        for i in 0..11 {
            events.push(
                EventRecord::from_pairs(format!("e{i}"), &[("busy", 1), ("other", 2)]).unwrap(),
            );
        }
        let s = build_standings(&events, TiesPolicy::Reject).unwrap();
        let warnings = s.warnings();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("`busy` played 12 games"));
        let balanced = build_standings(&[field("e", 5)], TiesPolicy::Reject).unwrap();
        assert!(balanced.warnings().is_empty());
    }

    #[test]
    fn contest_lookup() {
        let s = build_standings(&[field("e", 4)], TiesPolicy::Reject).unwrap();
        let c = s.contest_for(&id("c2"), &[id("c1"), id("c4")]).unwrap();
        assert_eq!(c.protagonist().value(), 2.0 / 3.0);
        assert_eq!(c.opponents()[1].value(), 0.0);
        assert_eq!(
            s.contest_for(&id("zz"), &[id("c1")]),
            Err(IngestError::UnknownCompetitor("zz".into()))
        );
        assert_eq!(s.contest_for(&id("c1"), &[]), Err(IngestError::NoOpponents));
    }

    #[test]
    fn error_context_names_the_event() {
        let events = [
            field("fine", 3),
            EventRecord::from_pairs("broken", &[("x", 1), ("y", 1)]).unwrap(),
        ];
        let err = build_standings(&events, TiesPolicy::Reject).unwrap_err();
        assert!(err.to_string().contains("`broken`"));
    }

    fn arb_event(tag: usize) -> impl Strategy<Value = EventRecord> {
        proptest::sample::subsequence((0..12).collect::<Vec<u32>>(), 2..=12)
            .prop_shuffle()
            .prop_map(move |members| {
                let placements = members
                    .iter()
                    .zip(1..)
                    .map(|(m, rank)| Placement {
                        competitor: CompetitorId::new(format!("p{m}")).unwrap(),
                        rank,
                    })
                    .collect();
                EventRecord::new(format!("ev{tag}"), placements)
            })
    }

    fn arb_events() -> impl Strategy<Value = Vec<EventRecord>> {
        (0usize..8).prop_flat_map(|k| (0..k).map(arb_event).collect::<Vec<_>>())
    }

    proptest! {
        #[test]
        fn totals_balance(events in arb_events()) {
            let s = build_standings(&events, TiesPolicy::Reject).unwrap();
            let games: usize = events.iter().map(|e| e.placements.len() * (e.placements.len() - 1) / 2).sum();
            let rows = s.rows();
            let wins: f64 = rows.iter().map(|r| r.wins).sum();
            let losses: f64 = rows.iter().map(|r| r.losses).sum();
            prop_assert_eq!(wins, games as f64);
            prop_assert_eq!(losses, games as f64);
            for row in &rows {
                let expected: usize = events
                    .iter()
                    .filter(|e| e.placements.iter().any(|p| p.competitor == row.competitor))
                    .map(|e| e.placements.len() - 1)
                    .sum();
                prop_assert_eq!(row.games, expected as f64);
            }
        }

        #[test]
        fn expansion_size(e in arb_event(0)) {
            let k = e.placements.len();
            prop_assert_eq!(expand_event(&e, TiesPolicy::Reject).unwrap().len(), k * (k - 1) / 2);
        }

        #[test]
        fn order_independent(events in arb_events()) {
            let forward = build_standings(&events, TiesPolicy::Reject).unwrap();
            let mut reversed = events.clone();
            reversed.reverse();
            prop_assert_eq!(forward, build_standings(&reversed, TiesPolicy::Reject).unwrap());
        }
    }
}
