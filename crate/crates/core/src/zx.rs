//! Layered ZX diagrams.
//!
//! A [`Diagram`] is a simple graph of Z (green) and X (red) spiders with
//! phases in multiples of π/2, plus degree-1 legs: input and output
//! boundaries and measurement-outcome stubs. Time runs bottom to top, i.e.
//! with increasing `layer`; layer 0 is the state-preparation slice.
//!
//! Nodes and edges are kept in canonical order (layer, row, col, kind, id),
//! so iteration order and serialized bytes depend only on diagram content.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A spider phase in units of π/2, reduced mod 4.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(u8);

impl Phase {
    pub const ZERO: Phase = Phase(0);
    pub const HALF_PI: Phase = Phase(1);
    pub const PI: Phase = Phase(2);
    pub const THREE_HALVES_PI: Phase = Phase(3);

    pub fn new(quarter_turns: i64) -> Self {
        Phase(quarter_turns.rem_euclid(4) as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// ±π/2.
    pub fn is_half(self) -> bool {
        self.0 % 2 == 1
    }

    /// 0 or π.
    pub fn is_pi_multiple(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn label(self) -> &'static str {
        ["", "π/2", "π", "3π/2"][self.0 as usize]
    }

    pub fn tex(self) -> &'static str {
        ["", "$\\frac{\\pi}{2}$", "$\\pi$", "$\\frac{3\\pi}{2}$"][self.0 as usize]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpiderColor {
    /// Green.
    Z,
    /// Red.
    X,
}

impl SpiderColor {
    pub fn opposite(self) -> SpiderColor {
        match self {
            SpiderColor::Z => SpiderColor::X,
            SpiderColor::X => SpiderColor::Z,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for NodeId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

/// Identifier of a measurement outcome. Surface-code diagrams use
/// `r{round}:{plaquette}`, e.g. `r1:X3`; see [`crate::surface::CheckLabel`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CheckId(String);

impl CheckId {
    pub fn new(id: impl Into<String>) -> Self {
        CheckId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for CheckId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl From<&str> for CheckId {
    fn from(s: &str) -> Self {
        CheckId(s.to_owned())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Spider { color: SpiderColor, phase: Phase },
    BoundaryIn,
    BoundaryOut,
    MeasureOut { check: CheckId },
}

impl NodeKind {
    pub fn z(phase: Phase) -> Self {
        NodeKind::Spider {
            color: SpiderColor::Z,
            phase,
        }
    }

    pub fn x(phase: Phase) -> Self {
        NodeKind::Spider {
            color: SpiderColor::X,
            phase,
        }
    }

    fn tag(&self) -> u8 {
        match self {
            NodeKind::Spider { .. } => 0,
            NodeKind::BoundaryIn => 1,
            NodeKind::BoundaryOut => 2,
            NodeKind::MeasureOut { .. } => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NodeKind::Spider { .. } => "spider",
            NodeKind::BoundaryIn => "boundary_in",
            NodeKind::BoundaryOut => "boundary_out",
            NodeKind::MeasureOut { .. } => "measure_out",
        }
    }

    /// Boundary legs and measurement stubs.
    pub fn is_leg(&self) -> bool {
        !matches!(self, NodeKind::Spider { .. })
    }

    pub fn as_spider(&self) -> Option<(SpiderColor, Phase)> {
        match *self {
            NodeKind::Spider { color, phase } => Some((color, phase)),
            _ => None,
        }
    }

    pub fn check(&self) -> Option<&CheckId> {
        match self {
            NodeKind::MeasureOut { check } => Some(check),
            _ => None,
        }
    }
}

/// Rendering position; also the primary sort key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub col: i32,
    pub row: i32,
    pub layer: i32,
}

impl Pos {
    pub fn new(col: i32, row: i32, layer: i32) -> Self {
        Pos { col, row, layer }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub pos: Pos,
}

impl Node {
    pub fn new(id: impl Into<NodeId>, kind: NodeKind, pos: Pos) -> Self {
        Node {
            id: id.into(),
            kind,
            pos,
        }
    }

    fn sort_key(&self) -> (i32, i32, i32, u8, &NodeId) {
        (
            self.pos.layer,
            self.pos.row,
            self.pos.col,
            self.kind.tag(),
            &self.id,
        )
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    #[default]
    Plain,
    /// Reserved; not produced by this crate and rejected by [`Diagram::validate`].
    Hadamard,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn plain(a: impl Into<NodeId>, b: impl Into<NodeId>) -> Self {
        Edge {
            a: a.into(),
            b: b.into(),
            kind: EdgeKind::Plain,
        }
    }
}

/// An invariant violation found by [`Diagram::validate`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    DuplicateId {
        node: NodeId,
    },
    NegativeLayer {
        node: NodeId,
    },
    MissingEndpoint {
        node: NodeId,
        edge: (NodeId, NodeId),
    },
    SelfLoop {
        node: NodeId,
    },
    ParallelEdge {
        node: NodeId,
        other: NodeId,
    },
    NonPlainEdge {
        node: NodeId,
        other: NodeId,
    },
    LegDegree {
        node: NodeId,
        degree: usize,
    },
    IsolatedSpider {
        node: NodeId,
    },
    StubNotOnSpider {
        node: NodeId,
    },
}

impl Violation {
    pub fn node(&self) -> &NodeId {
        match self {
            Violation::DuplicateId { node }
            | Violation::NegativeLayer { node }
            | Violation::MissingEndpoint { node, .. }
            | Violation::SelfLoop { node }
            | Violation::ParallelEdge { node, .. }
            | Violation::NonPlainEdge { node, .. }
            | Violation::LegDegree { node, .. }
            | Violation::IsolatedSpider { node }
            | Violation::StubNotOnSpider { node } => node,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId { node } => write!(f, "{node}: duplicate node id"),
            Violation::NegativeLayer { node } => write!(f, "{node}: negative layer"),
            Violation::MissingEndpoint { node, edge } => {
                write!(
                    f,
                    "{node}: endpoint of edge {}-{} does not exist",
                    edge.0, edge.1
                )
            }
            Violation::SelfLoop { node } => write!(f, "{node}: self-loop"),
            Violation::ParallelEdge { node, other } => {
                write!(f, "{node}: parallel edges to {other}")
            }
            Violation::NonPlainEdge { node, other } => {
                write!(f, "{node}: non-plain edge to {other}")
            }
            Violation::LegDegree { node, degree } => {
                write!(f, "{node}: leg has degree {degree}, expected 1")
            }
            Violation::IsolatedSpider { node } => write!(f, "{node}: spider has no edges"),
            Violation::StubNotOnSpider { node } => {
                write!(f, "{node}: measurement stub is not attached to a spider")
            }
        }
    }
}

/// A layered ZX diagram. Immutable once built.
#[derive(Clone, Debug)]
pub struct Diagram {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    metadata: BTreeMap<String, String>,
    index: HashMap<NodeId, usize>,
    ends: Vec<Option<(usize, usize)>>,
    incident: Vec<Vec<usize>>,
    lookup: HashMap<(usize, usize), usize>,
}

impl PartialEq for Diagram {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges && self.metadata == other.metadata
    }
}

impl Eq for Diagram {}

impl Diagram {
    /// Canonicalizes the given parts. Never fails; invariant violations are
    /// reported by [`Diagram::validate`].
    pub fn new(mut nodes: Vec<Node>, edges: Vec<Edge>, metadata: BTreeMap<String, String>) -> Self {
        nodes.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            index.entry(n.id.clone()).or_insert(i);
        }
        let rank = |id: &NodeId| index.get(id).copied().unwrap_or(usize::MAX);
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| {
                if (rank(&e.b), &e.b) < (rank(&e.a), &e.a) {
                    Edge {
                        a: e.b,
                        b: e.a,
                        kind: e.kind,
                    }
                } else {
                    e
                }
            })
            .collect();
        edges.sort_by(|x, y| {
            (rank(&x.a), &x.a, rank(&x.b), &x.b, x.kind).cmp(&(
                rank(&y.a),
                &y.a,
                rank(&y.b),
                &y.b,
                y.kind,
            ))
        });

        let mut incident = vec![Vec::new(); nodes.len()];
        let mut lookup = HashMap::new();
        let ends: Vec<_> = edges
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let (a, b) = (index.get(&e.a).copied()?, index.get(&e.b).copied()?);
                incident[a].push(k);
                if a != b {
                    incident[b].push(k);
                }
                lookup.entry((a.min(b), a.max(b))).or_insert(k);
                Some((a, b))
            })
            .collect();

        Diagram {
            nodes,
            edges,
            metadata,
            index,
            ends,
            incident,
            lookup,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }

    pub fn node_index(&self, id: &NodeId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node_by_id(&self, id: &NodeId) -> Option<&Node> {
        self.node_index(id).map(|i| &self.nodes[i])
    }

    /// Edge indices incident to a node, in canonical edge order.
    pub fn incident(&self, node: usize) -> &[usize] {
        &self.incident[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.incident[node].len()
    }

    /// Node indices of an edge. Panics if an endpoint is missing, which a
    /// valid diagram rules out.
    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        self.ends[edge].unwrap_or_else(|| {
            panic!(
                "edge {}-{} has a missing endpoint",
                self.edges[edge].a, self.edges[edge].b
            )
        })
    }

    /// The node across `edge` from `node`.
    pub fn other_end(&self, edge: usize, node: usize) -> usize {
        let (a, b) = self.endpoints(edge);
        if a == node {
            b
        } else {
            a
        }
    }

    pub fn edge_between(&self, a: &NodeId, b: &NodeId) -> Option<usize> {
        let (i, j) = (self.node_index(a)?, self.node_index(b)?);
        self.lookup.get(&(i.min(j), i.max(j))).copied()
    }

    /// Indices of spider nodes.
    pub fn spiders(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| !self.nodes[i].kind.is_leg())
    }

    /// Indices of boundary legs and measurement stubs.
    pub fn legs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].kind.is_leg())
    }

    /// The single edge of a degree-1 leg.
    pub fn leg_edge(&self, leg: usize) -> Option<usize> {
        match self.incident[leg].as_slice() {
            [e] if self.nodes[leg].kind.is_leg() => Some(*e),
            _ => None,
        }
    }

    /// Every invariant violation, sorted by node id.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen: HashMap<&NodeId, usize> = HashMap::new();
        for n in &self.nodes {
            *seen.entry(&n.id).or_default() += 1;
            if n.pos.layer < 0 {
                out.push(Violation::NegativeLayer { node: n.id.clone() });
            }
        }
        for (id, count) in &seen {
            if *count > 1 {
                out.push(Violation::DuplicateId {
                    node: (*id).clone(),
                });
            }
        }

        let mut pairs: HashMap<(usize, usize), usize> = HashMap::new();
        for (k, e) in self.edges.iter().enumerate() {
            let Some((a, b)) = self.ends[k] else {
                for id in [&e.a, &e.b] {
                    if !self.index.contains_key(id) {
                        out.push(Violation::MissingEndpoint {
                            node: id.clone(),
                            edge: (e.a.clone(), e.b.clone()),
                        });
                    }
                }
                continue;
            };
            if a == b {
                out.push(Violation::SelfLoop { node: e.a.clone() });
            }
            if e.kind != EdgeKind::Plain {
                out.push(Violation::NonPlainEdge {
                    node: e.a.clone(),
                    other: e.b.clone(),
                });
            }
            let count = pairs.entry((a.min(b), a.max(b))).or_default();
            *count += 1;
            if *count == 2 {
                out.push(Violation::ParallelEdge {
                    node: e.a.clone(),
                    other: e.b.clone(),
                });
            }
        }

        for (i, n) in self.nodes.iter().enumerate() {
            let degree = self.degree(i);
            match &n.kind {
                NodeKind::Spider { .. } => {
                    if degree == 0 {
                        out.push(Violation::IsolatedSpider { node: n.id.clone() });
                    }
                }
                kind => {
                    if degree != 1 {
                        out.push(Violation::LegDegree {
                            node: n.id.clone(),
                            degree,
                        });
                    } else if matches!(kind, NodeKind::MeasureOut { .. }) {
                        let other = self.other_end(self.incident[i][0], i);
                        if self.nodes[other].kind.is_leg() {
                            out.push(Violation::StubNotOnSpider { node: n.id.clone() });
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}

// ---------------------------------------------------------------------------
// Canonical document
// ---------------------------------------------------------------------------

pub const DOCUMENT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum KindTag {
    Spider,
    BoundaryIn,
    BoundaryOut,
    MeasureOut,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: NodeId,
    kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    color: Option<SpiderColor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phase: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    check_id: Option<CheckId>,
    pos: [i32; 3],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramDoc {
    version: u32,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
    nodes: Vec<NodeDoc>,
    edges: Vec<Vec<String>>,
    #[serde(default)]
    #[allow(dead_code)]
    webs: Option<serde::de::IgnoredAny>,
}

fn node_doc(n: &Node) -> NodeDoc {
    let (color, phase, check_id, kind) = match &n.kind {
        NodeKind::Spider { color, phase } => {
            (Some(*color), Some(phase.value()), None, KindTag::Spider)
        }
        NodeKind::BoundaryIn => (None, None, None, KindTag::BoundaryIn),
        NodeKind::BoundaryOut => (None, None, None, KindTag::BoundaryOut),
        NodeKind::MeasureOut { check } => (None, None, Some(check.clone()), KindTag::MeasureOut),
    };
    NodeDoc {
        id: n.id.clone(),
        kind,
        color,
        phase,
        check_id,
        pos: [n.pos.col, n.pos.row, n.pos.layer],
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("document types always serialize")
}

pub(crate) fn write_list(out: &mut String, key: &str, items: &[String], last: bool) {
    if items.is_empty() {
        out.push_str(&format!("  {}: []", json(&key)));
    } else {
        out.push_str(&format!("  {}: [\n", json(&key)));
        for (k, item) in items.iter().enumerate() {
            out.push_str("    ");
            out.push_str(item);
            if k + 1 < items.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("  ]");
    }
    out.push_str(if last { "\n" } else { ",\n" });
}

/// Canonical UTF-8 document: one node or edge per line, canonical order.
pub fn serialize(d: &Diagram) -> String {
    serialize_with(d, None)
}

/// [`serialize`] with one extra trailing list field.
pub(crate) fn serialize_with(d: &Diagram, extra: Option<(&str, &[String])>) -> String {
    let mut out = String::from("{\n");
    out.push_str(&format!("  \"version\": {DOCUMENT_VERSION},\n"));
    out.push_str(&format!("  \"metadata\": {},\n", json(&d.metadata)));
    let nodes: Vec<String> = d.nodes.iter().map(|n| json(&node_doc(n))).collect();
    write_list(&mut out, "nodes", &nodes, false);
    let edges: Vec<String> = d
        .edges
        .iter()
        .map(|e| match e.kind {
            EdgeKind::Plain => json(&[&e.a, &e.b]),
            EdgeKind::Hadamard => json(&[e.a.as_str(), e.b.as_str(), "hadamard"]),
        })
        .collect();
    write_list(&mut out, "edges", &edges, extra.is_none());
    if let Some((key, items)) = extra {
        write_list(&mut out, key, items, true);
    }
    out.push_str("}\n");
    out
}

pub(crate) fn document_error(err: serde_json::Error) -> Error {
    Error::Document {
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

/// Parses a diagram document. Format errors and dangling references are
/// errors; structural invariants are left to [`Diagram::validate`].
pub fn deserialize(text: &str) -> Result<Diagram> {
    let doc: DiagramDoc = serde_json::from_str(text).map_err(document_error)?;
    from_doc(doc)
}

fn from_doc(doc: DiagramDoc) -> Result<Diagram> {
    if doc.version != DOCUMENT_VERSION {
        return Err(Error::Parse(format!(
            "version: unsupported document version {}",
            doc.version
        )));
    }
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    let mut ids = std::collections::HashSet::new();
    for (k, n) in doc.nodes.into_iter().enumerate() {
        let field = |msg: &str| Error::Parse(format!("nodes[{k}] ({}): {msg}", n.id));
        let kind = match n.kind {
            KindTag::Spider => {
                let color = n.color.ok_or_else(|| field("spider without color"))?;
                let phase = n.phase.ok_or_else(|| field("spider without phase"))?;
                if phase > 3 {
                    return Err(field("phase must be 0..=3 (units of π/2)"));
                }
                if n.check_id.is_some() {
                    return Err(field("check_id on a spider"));
                }
                NodeKind::Spider {
                    color,
                    phase: Phase(phase),
                }
            }
            other => {
                if n.color.is_some() || n.phase.is_some() {
                    return Err(field("color/phase on a non-spider node"));
                }
                match other {
                    KindTag::BoundaryIn => NodeKind::BoundaryIn,
                    KindTag::BoundaryOut => NodeKind::BoundaryOut,
                    KindTag::MeasureOut => NodeKind::MeasureOut {
                        check: n
                            .check_id
                            .clone()
                            .ok_or_else(|| field("measure_out without check_id"))?,
                    },
                    KindTag::Spider => unreachable!(),
                }
            }
        };
        if !ids.insert(n.id.clone()) {
            return Err(field("duplicate id"));
        }
        nodes.push(Node {
            id: n.id,
            kind,
            pos: Pos::new(n.pos[0], n.pos[1], n.pos[2]),
        });
    }
    let mut edges = Vec::with_capacity(doc.edges.len());
    for (k, e) in doc.edges.into_iter().enumerate() {
        let kind = match e.get(2).map(String::as_str) {
            None | Some("plain") => EdgeKind::Plain,
            Some("hadamard") => EdgeKind::Hadamard,
            Some(other) => {
                return Err(Error::Parse(format!(
                    "edges[{k}]: unknown edge kind {other:?}"
                )))
            }
        };
        if !(2..=3).contains(&e.len()) {
            return Err(Error::Parse(format!(
                "edges[{k}]: expected [a, b] or [a, b, kind]"
            )));
        }
        for id in &e[..2] {
            if !ids.contains(&NodeId::new(id.clone())) {
                return Err(Error::Parse(format!("edges[{k}]: unknown node id {id:?}")));
            }
        }
        edges.push(Edge {
            a: NodeId::new(e[0].clone()),
            b: NodeId::new(e[1].clone()),
            kind,
        });
    }
    Ok(Diagram::new(nodes, edges, doc.metadata))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn minimal_y() -> Diagram {
        Diagram::new(
            vec![
                Node::new("y", NodeKind::z(Phase::HALF_PI), Pos::new(0, 0, 0)),
                Node::new("out", NodeKind::BoundaryOut, Pos::new(0, 0, 1)),
            ],
            vec![Edge::plain("y", "out")],
            BTreeMap::new(),
        )
    }

    #[test]
    fn phase_predicates_partition() {
        for v in 0..4 {
            let p = Phase::new(v);
            assert_ne!(p.is_half(), p.is_pi_multiple());
        }
        assert_eq!(Phase::new(-1), Phase::THREE_HALVES_PI);
        assert_eq!(Phase::new(6), Phase::PI);
    }

    #[test]
    fn minimal_y_state_is_valid() {
        assert!(minimal_y().validate().is_empty());
    }

    #[test]
    fn boundary_with_degree_two_is_flagged() {
        let d = Diagram::new(
            vec![
                Node::new("a", NodeKind::z(Phase::ZERO), Pos::new(0, 0, 0)),
                Node::new("b", NodeKind::z(Phase::ZERO), Pos::new(1, 0, 0)),
                Node::new("out", NodeKind::BoundaryOut, Pos::new(0, 0, 1)),
            ],
            vec![Edge::plain("a", "out"), Edge::plain("b", "out")],
            BTreeMap::new(),
        );
        assert_eq!(
            d.validate(),
            vec![Violation::LegDegree {
                node: "out".into(),
                degree: 2
            }]
        );
    }

    #[test]
    fn each_violation_kind_is_detected() {
        let spider = |id: &str, col| Node::new(id, NodeKind::z(Phase::ZERO), Pos::new(col, 0, 0));
        let cases: Vec<(Vec<Node>, Vec<Edge>, Violation)> = vec![
            (
                vec![spider("a", 0), spider("a", 1), spider("b", 2)],
                vec![Edge::plain("a", "b")],
                Violation::DuplicateId { node: "a".into() },
            ),
            (
                vec![
                    spider("a", 0),
                    Node::new("b", NodeKind::z(Phase::ZERO), Pos::new(0, 0, -1)),
                ],
                vec![Edge::plain("a", "b")],
                Violation::NegativeLayer { node: "b".into() },
            ),
            (
                vec![spider("a", 0)],
                vec![Edge::plain("a", "ghost")],
                Violation::MissingEndpoint {
                    node: "ghost".into(),
                    edge: ("a".into(), "ghost".into()),
                },
            ),
            (
                vec![spider("a", 0)],
                vec![Edge::plain("a", "a")],
                Violation::SelfLoop { node: "a".into() },
            ),
            (
                vec![spider("a", 0), spider("b", 1)],
                vec![Edge::plain("a", "b"), Edge::plain("b", "a")],
                Violation::ParallelEdge {
                    node: "a".into(),
                    other: "b".into(),
                },
            ),
            (
                vec![spider("a", 0), spider("b", 1)],
                vec![Edge {
                    a: "a".into(),
                    b: "b".into(),
                    kind: EdgeKind::Hadamard,
                }],
                Violation::NonPlainEdge {
                    node: "a".into(),
                    other: "b".into(),
                },
            ),
            (
                vec![spider("a", 0)],
                vec![],
                Violation::IsolatedSpider { node: "a".into() },
            ),
            (
                vec![
                    Node::new("in", NodeKind::BoundaryIn, Pos::new(0, 0, 0)),
                    Node::new(
                        "m",
                        NodeKind::MeasureOut { check: "c".into() },
                        Pos::new(0, 0, 1),
                    ),
                ],
                vec![Edge::plain("in", "m")],
                Violation::StubNotOnSpider { node: "m".into() },
            ),
        ];
        for (nodes, edges, expected) in cases {
            let d = Diagram::new(nodes, edges, BTreeMap::new());
            let found = d.validate();
            assert!(found.contains(&expected), "{expected:?} not in {found:?}");
        }
    }

    #[test]
    fn document_roundtrip_is_byte_stable() {
        let d = minimal_y();
        let text = serialize(&d);
        let back = deserialize(&text).unwrap();
        assert_eq!(back, d);
        assert_eq!(serialize(&back), text);
    }

    #[test]
    fn missing_reference_is_a_parse_error() {
        let text = serialize(&minimal_y()).replace("[\"y\",\"out\"]", "[\"y\",\"nowhere\"]");
        let err = deserialize(&text).unwrap_err();
        assert!(err.to_string().contains("edges[0]"), "{err}");
    }

    #[test]
    fn unknown_kind_is_rejected_with_position() {
        let text = serialize(&minimal_y()).replace("boundary_out", "boundary_sideways");
        match deserialize(&text).unwrap_err() {
            Error::Document { line, .. } => assert_eq!(line, 6),
            other => panic!("unexpected {other}"),
        }
    }
}
