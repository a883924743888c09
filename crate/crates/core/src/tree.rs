//! Win probabilities from a tree of known head-to-head probabilities.
//!
//! With `n` known pairwise probabilities linking the protagonist `A` to every
//! opponent, the reverse odds of the multi-opponent contest are
//!
//! ```text
//! 1/P_n - 1 = Σ_i Π_{edges on the path A → B_i} P(child, parent) / P(parent, child)
//! ```
//!
//! No winning percentage is needed. If one percentage is known, the rest
//! follow edge by edge from the involution `b = P(a, P(a, b))`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{involution_partner, stable_sum, Probability, WinPct};

/// Edge ratios beyond this factor switch path products to log space.
const LOG_SPACE_THRESHOLD: f64 = 1e8;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum GraphError {
    #[error("competitor names must be nonempty")]
    EmptyName,
    #[error("edge {u}–{v}: probability {p} must lie strictly between 0 and 1")]
    EdgeProbability {
        u: CompetitorId,
        v: CompetitorId,
        p: f64,
    },
    #[error("self loop on {0}")]
    SelfLoop(CompetitorId),
    #[error("duplicate edge {0}–{1}")]
    DuplicateEdge(CompetitorId, CompetitorId),
    #[error("extra edges: {edges} edges on {vertices} vertices, so the graph has a cycle")]
    ExtraEdges { vertices: usize, edges: usize },
    #[error("disconnected: {} unreachable from {root}", join(.unreachable))]
    Disconnected {
        root: CompetitorId,
        unreachable: Vec<CompetitorId>,
    },
    #[error("unknown competitor {0}")]
    UnknownVertex(CompetitorId),
    #[error("anchor percentage must lie strictly between 0 and 1, got {0}")]
    AnchorBoundary(f64),
    /// Only reachable for graphs with cycles, which trees never have.
    #[error("edge {u}–{v} disagrees with the percentages derived so far")]
    InconsistentEdge { u: CompetitorId, v: CompetitorId },
}

fn join(ids: &[CompetitorId]) -> String {
    ids.iter()
        .map(|id| id.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CompetitorId(String);

impl CompetitorId {
    pub fn new(name: impl Into<String>) -> Result<Self, GraphError> {
        let name = name.into();
        if name.is_empty() {
            Err(GraphError::EmptyName)
        } else {
            Ok(CompetitorId(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for CompetitorId {
    type Error = GraphError;

    fn try_from(s: String) -> Result<Self, GraphError> {
        CompetitorId::new(s)
    }
}

impl From<CompetitorId> for String {
    fn from(id: CompetitorId) -> String {
        id.0
    }
}

impl fmt::Display for CompetitorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A known head-to-head probability, stored in one direction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairwiseEdge {
    u: CompetitorId,
    v: CompetitorId,
    p_u_beats_v: Probability,
}

impl PairwiseEdge {
    pub fn new(u: CompetitorId, v: CompetitorId, p_u_beats_v: f64) -> Result<Self, GraphError> {
        if !(p_u_beats_v > 0.0 && p_u_beats_v < 1.0) {
            return Err(GraphError::EdgeProbability {
                u,
                v,
                p: p_u_beats_v,
            });
        }
        let p_u_beats_v = Probability::new(p_u_beats_v).expect("checked above");
        Ok(PairwiseEdge { u, v, p_u_beats_v })
    }

    /// Convenience constructor from plain names.
    pub fn named(u: &str, v: &str, p_u_beats_v: f64) -> Result<Self, GraphError> {
        PairwiseEdge::new(CompetitorId::new(u)?, CompetitorId::new(v)?, p_u_beats_v)
    }

    pub fn u(&self) -> &CompetitorId {
        &self.u
    }

    pub fn v(&self) -> &CompetitorId {
        &self.v
    }

    pub fn p_u_beats_v(&self) -> Probability {
        self.p_u_beats_v
    }

    /// Probability that `who` beats the other endpoint.
    fn p_beats_other(&self, who: &CompetitorId) -> f64 {
        if who == &self.u {
            self.p_u_beats_v.value()
        } else {
            1.0 - self.p_u_beats_v.value()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompetitionGraph {
    root: CompetitorId,
    vertices: BTreeSet<CompetitorId>,
    edges: Vec<PairwiseEdge>,
}

impl CompetitionGraph {
    /// Vertices are the root plus every edge endpoint.
    pub fn new(root: CompetitorId, edges: Vec<PairwiseEdge>) -> Self {
        let mut vertices = BTreeSet::new();
        vertices.insert(root.clone());
        for e in &edges {
            vertices.insert(e.u.clone());
            vertices.insert(e.v.clone());
        }
        CompetitionGraph {
            root,
            vertices,
            edges,
        }
    }

    /// Uses an explicit vertex set, which may contain isolated competitors.
    pub fn with_vertices(
        root: CompetitorId,
        vertices: impl IntoIterator<Item = CompetitorId>,
        edges: Vec<PairwiseEdge>,
    ) -> Result<Self, GraphError> {
        let vertices: BTreeSet<CompetitorId> = vertices.into_iter().collect();
        if !vertices.contains(&root) {
            return Err(GraphError::UnknownVertex(root));
        }
        for e in &edges {
            for end in [&e.u, &e.v] {
                if !vertices.contains(end) {
                    return Err(GraphError::UnknownVertex(end.clone()));
                }
            }
        }
        Ok(CompetitionGraph {
            root,
            vertices,
            edges,
        })
    }

    pub fn root(&self) -> &CompetitorId {
        &self.root
    }

    pub fn vertices(&self) -> &BTreeSet<CompetitorId> {
        &self.vertices
    }

    pub fn edges(&self) -> &[PairwiseEdge] {
        &self.edges
    }

    /// The same graph with a different protagonist.
    pub fn with_root(&self, root: CompetitorId) -> Result<Self, GraphError> {
        CompetitionGraph::with_vertices(root, self.vertices.iter().cloned(), self.edges.clone())
    }
}

#[derive(Clone, Debug)]
struct ParentLink {
    parent: CompetitorId,
    child_beats_parent: f64,
    parent_beats_child: f64,
}

/// A validated tree hung from one vertex, in breadth-first order.
#[derive(Clone, Debug)]
pub struct RootedTree {
    root: CompetitorId,
    order: Vec<CompetitorId>,
    parent: BTreeMap<CompetitorId, ParentLink>,
}

impl RootedTree {
    pub fn root(&self) -> &CompetitorId {
        &self.root
    }

    /// Vertices in breadth-first order from the root, neighbors by name.
    pub fn order(&self) -> &[CompetitorId] {
        &self.order
    }

    pub fn parent(&self, id: &CompetitorId) -> Option<&CompetitorId> {
        self.parent.get(id).map(|link| &link.parent)
    }

    /// The unique path from the root to `id`, both ends included.
    pub fn path_from_root(&self, id: &CompetitorId) -> Option<Vec<CompetitorId>> {
        if id != &self.root && !self.parent.contains_key(id) {
            return None;
        }
        let mut path = vec![id.clone()];
        let mut cur = id;
        while let Some(link) = self.parent.get(cur) {
            path.push(link.parent.clone());
            cur = &link.parent;
        }
        path.reverse();
        Some(path)
    }

    /// Reverse odds `P(child, parent) / P(parent, child)` along each path,
    /// in breadth-first order, as natural logs when `log_space` is set.
    fn path_products(&self, log_space: bool) -> Vec<f64> {
        let mut acc: BTreeMap<&CompetitorId, f64> = BTreeMap::new();
        acc.insert(&self.root, if log_space { 0.0 } else { 1.0 });
        let mut out = Vec::with_capacity(self.order.len().saturating_sub(1));
        for id in &self.order[1..] {
            let link = &self.parent[id];
            let base = acc[&link.parent];
            let value = if log_space {
                base + link.child_beats_parent.ln() - link.parent_beats_child.ln()
            } else {
                base * (link.child_beats_parent / link.parent_beats_child)
            };
            acc.insert(id, value);
            out.push(value);
        }
        out
    }

    /// Path formula value for the root as protagonist.
    pub fn win_probability(&self) -> Probability {
        let lopsided = self.parent.values().any(|link| {
            let ratio = link.child_beats_parent / link.parent_beats_child;
            !(1.0 / LOG_SPACE_THRESHOLD..=LOG_SPACE_THRESHOLD).contains(&ratio)
        });
        let p = if lopsided {
            let logs = self.path_products(true);
            let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let log_total = if max == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                max + stable_sum(logs.iter().map(|l| (l - max).exp()).collect()).ln()
            };
            // 1 / (1 + e^L) without overflow
            if log_total > 0.0 {
                let e = (-log_total).exp();
                e / (1.0 + e)
            } else {
                1.0 / (1.0 + log_total.exp())
            }
        } else {
            1.0 / (1.0 + stable_sum(self.path_products(false)))
        };
        Probability::new(p.clamp(0.0, 1.0)).expect("clamped")
    }
}

/// vertex → [(neighbor, P(neighbor beats vertex), P(vertex beats neighbor))]
type Adjacency<'g> = BTreeMap<&'g CompetitorId, Vec<(&'g CompetitorId, f64, f64)>>;

fn adjacency(g: &CompetitionGraph) -> Result<Adjacency<'_>, GraphError> {
    let mut seen = BTreeSet::new();
    for e in &g.edges {
        if e.u == e.v {
            return Err(GraphError::SelfLoop(e.u.clone()));
        }
        let key = if e.u < e.v {
            (&e.u, &e.v)
        } else {
            (&e.v, &e.u)
        };
        if !seen.insert(key) {
            return Err(GraphError::DuplicateEdge(key.0.clone(), key.1.clone()));
        }
    }
    if g.edges.len() >= g.vertices.len() {
        return Err(GraphError::ExtraEdges {
            vertices: g.vertices.len(),
            edges: g.edges.len(),
        });
    }
    let mut adj: Adjacency<'_> = g.vertices.iter().map(|v| (v, Vec::new())).collect();
    for e in &g.edges {
        let entry = adj
            .get_mut(&e.u)
            .ok_or_else(|| GraphError::UnknownVertex(e.u.clone()))?;
        entry.push((&e.v, e.p_beats_other(&e.v), e.p_beats_other(&e.u)));
        let entry = adj
            .get_mut(&e.v)
            .ok_or_else(|| GraphError::UnknownVertex(e.v.clone()))?;
        entry.push((&e.u, e.p_beats_other(&e.u), e.p_beats_other(&e.v)));
    }
    for list in adj.values_mut() {
        list.sort_by(|x, y| x.0.cmp(y.0));
    }
    Ok(adj)
}

fn hang(adj: &Adjacency<'_>, root: &CompetitorId) -> Result<RootedTree, GraphError> {
    if !adj.contains_key(root) {
        return Err(GraphError::UnknownVertex(root.clone()));
    }
    let mut order = vec![root.clone()];
    let mut parent = BTreeMap::new();
    let mut visited: BTreeSet<&CompetitorId> = BTreeSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(cur) = queue.pop_front() {
        for &(next, next_beats_cur, cur_beats_next) in &adj[cur] {
            if visited.insert(next) {
                parent.insert(
                    next.clone(),
                    ParentLink {
                        parent: cur.clone(),
                        child_beats_parent: next_beats_cur,
                        parent_beats_child: cur_beats_next,
                    },
                );
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    if order.len() < adj.len() {
        let unreachable = adj
            .keys()
            .filter(|v| !visited.contains(*v))
            .map(|v| (*v).clone())
            .collect();
        return Err(GraphError::Disconnected {
            root: root.clone(),
            unreachable,
        });
    }
    Ok(RootedTree {
        root: root.clone(),
        order,
        parent,
    })
}

/// Succeeds iff the graph is a tree; returns it hung from the graph's root.
pub fn validate_tree(g: &CompetitionGraph) -> Result<RootedTree, GraphError> {
    let adj = adjacency(g)?;
    hang(&adj, &g.root)
}

/// Probability that the root beats everyone else, from the edges alone.
pub fn p_n_from_tree(g: &CompetitionGraph) -> Result<Probability, GraphError> {
    Ok(validate_tree(g)?.win_probability())
}

/// Winning percentages recovered from one known anchor percentage.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Propagation {
    solved: Vec<(CompetitorId, WinPct)>,
}

impl Propagation {
    /// Competitors in the order they were solved, anchor first.
    pub fn solved(&self) -> &[(CompetitorId, WinPct)] {
        &self.solved
    }

    pub fn get(&self, id: &CompetitorId) -> Option<WinPct> {
        self.solved.iter().find(|(k, _)| k == id).map(|&(_, p)| p)
    }

    pub fn to_map(&self) -> BTreeMap<CompetitorId, WinPct> {
        self.solved.iter().cloned().collect()
    }
}

/// Walks the tree breadth-first from the anchor, setting each neighbor's
/// percentage to `P(p_s, P(s beats t))`.
pub fn propagate_percentages(
    g: &CompetitionGraph,
    anchor: &CompetitorId,
    anchor_pct: WinPct,
) -> Result<Propagation, GraphError> {
    if !anchor_pct.is_interior() {
        return Err(GraphError::AnchorBoundary(anchor_pct.value()));
    }
    let adj = adjacency(g)?;
    hang(&adj, &g.root)?;
    let tree = hang(&adj, anchor)?;
    let mut known: BTreeMap<&CompetitorId, WinPct> = BTreeMap::new();
    known.insert(anchor, anchor_pct);
    let mut solved = vec![(anchor.clone(), anchor_pct)];
    for id in &tree.order[1..] {
        let link = &tree.parent[id];
        let p_parent = known[&link.parent];
        let p_parent_beats_child =
            WinPct::new(link.parent_beats_child).expect("edge probability in (0, 1)");
        let pct = involution_partner(p_parent, p_parent_beats_child)
            .expect("solved percentages stay interior");
        known.insert(id, pct);
        solved.push((id.clone(), pct));
    }
    Ok(Propagation { solved })
}
