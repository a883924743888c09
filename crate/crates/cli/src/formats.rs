//! File formats read by the command line tool.
//!
//! Edges JSON:
//!
//! ```json
//! {"root": "A", "edges": [{"u": "A", "v": "B1", "p_u_beats_v": 0.6}]}
//! ```
//!
//! Events CSV, with a header row:
//!
//! ```text
//! event_id,competitor,rank
//! race-1,alice,1
//! race-1,bob,2
//! ```

use std::collections::HashMap;
use std::path::Path;

use multijames::ingest::{EventRecord, Placement};
use multijames::tree::{CompetitionGraph, CompetitorId, PairwiseEdge};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgesFile {
    root: String,
    edges: Vec<EdgeRow>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRow {
    u: String,
    v: String,
    p_u_beats_v: f64,
}

pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses an edges file. Structural problems (cycles, bad probabilities) are
/// left to graph validation.
pub fn parse_edges(text: &str, origin: &str) -> Result<CompetitionGraph, CliError> {
    let file: EdgesFile = serde_json::from_str(text).map_err(|e| {
        CliError::Parse(format!(
            "{origin}: line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    let root = CompetitorId::new(file.root)?;
    let edges = file
        .edges
        .into_iter()
        .map(|row| {
            PairwiseEdge::new(
                CompetitorId::new(row.u)?,
                CompetitorId::new(row.v)?,
                row.p_u_beats_v,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CompetitionGraph::new(root, edges))
}

#[derive(Debug, Deserialize)]
struct EventRow {
    event_id: String,
    competitor: String,
    rank: u32,
}

/// Events in order of first appearance, each with the line of its first row.
pub fn parse_events(text: &str, origin: &str) -> Result<Vec<(EventRecord, u64)>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::Parse(format!("{origin}: {e}")))?
        .clone();
    for required in ["event_id", "competitor", "rank"] {
        if !headers.iter().any(|h| h == required) {
            return Err(CliError::Parse(format!(
                "{origin}: line 1: header must contain `event_id,competitor,rank`, missing `{required}`"
            )));
        }
    }
    let mut events: Vec<(EventRecord, u64)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for result in reader.records() {
        let record = result.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CliError::Parse(format!("{origin}: line {line}: {e}"))
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row: EventRow = record.deserialize(Some(&headers)).map_err(|e| {
            let msg = match e.kind() {
                csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
                _ => e.to_string(),
            };
            CliError::Parse(format!("{origin}: line {line}: {msg}"))
        })?;
        let competitor = CompetitorId::new(row.competitor)
            .map_err(|e| CliError::Parse(format!("{origin}: line {line}: {e}")))?;
        if row.event_id.is_empty() {
            return Err(CliError::Parse(format!(
                "{origin}: line {line}: empty event_id"
            )));
        }
        let slot = *index.entry(row.event_id.clone()).or_insert_with(|| {
            events.push((EventRecord::new(row.event_id.clone(), Vec::new()), line));
            events.len() - 1
        });
        events[slot].0.placements.push(Placement {
            competitor,
            rank: row.rank,
        });
    }
    Ok(events)
}
