//! Rotated surface-code layouts and their layered ZX diagrams.
//!
//! Qubit `i = d·col + row`, with row 0 at the bottom and column 0 on the
//! left. Plaquette centres use doubled coordinates: data qubit `(col, row)`
//! sits at `(2·col, 2·row)` and the face between four qubits at odd
//! coordinates. X-type weight-2 plaquettes lie on the top and bottom edges,
//! Z-type weight-2 plaquettes on the left and right edges.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOperator};
use crate::zx::{CheckId, Diagram, Edge, Node, NodeId, NodeKind, Phase, Pos};

/// Plaquette type, which is also the Pauli it measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Basis {
    X,
    Z,
}

impl Basis {
    pub fn pauli(self) -> Pauli {
        match self {
            Basis::X => Pauli::X,
            Basis::Z => Pauli::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Z => 'Z',
        }
    }
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Basis::X),
            "Z" | "z" => Ok(Basis::Z),
            _ => Err(Error::Parse(format!("unknown basis {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plaquette {
    /// `X0`, `X1`, ... and `Z0`, ...; numbered by centre in (x, y) order.
    pub id: String,
    pub ptype: Basis,
    /// Sorted data-qubit indices, 2 or 4 of them.
    pub support: Vec<usize>,
    /// Doubled-coordinate centre.
    pub center: (i32, i32),
}

impl Plaquette {
    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn operator(&self, n: usize) -> PauliOperator {
        PauliOperator::uniform(n, self.ptype.pauli(), self.support.iter().copied())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    d: usize,
    x_plaquettes: Vec<Plaquette>,
    z_plaquettes: Vec<Plaquette>,
}

impl Layout {
    pub fn distance(&self) -> usize {
        self.d
    }

    pub fn num_qubits(&self) -> usize {
        self.d * self.d
    }

    pub fn index(&self, col: usize, row: usize) -> usize {
        self.d * col + row
    }

    /// `(col, row)` of a data qubit.
    pub fn coords(&self, q: usize) -> (usize, usize) {
        (q / self.d, q % self.d)
    }

    pub fn x_plaquettes(&self) -> &[Plaquette] {
        &self.x_plaquettes
    }

    pub fn z_plaquettes(&self) -> &[Plaquette] {
        &self.z_plaquettes
    }

    pub fn plaquettes_of(&self, basis: Basis) -> &[Plaquette] {
        match basis {
            Basis::X => &self.x_plaquettes,
            Basis::Z => &self.z_plaquettes,
        }
    }

    /// X plaquettes then Z plaquettes.
    pub fn plaquettes(&self) -> impl Iterator<Item = &Plaquette> {
        self.x_plaquettes.iter().chain(&self.z_plaquettes)
    }

    pub fn plaquette(&self, id: &str) -> Option<&Plaquette> {
        self.plaquettes().find(|p| p.id == id)
    }

    /// The corner that receives the injected state.
    pub fn corner(&self) -> usize {
        self.index(0, self.d - 1)
    }
}

/// Builds the distance-`d` rotated surface code.
pub fn build_layout(d: usize) -> Result<Layout> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidDistance(d));
    }
    let idx = |c: usize, r: usize| d * c + r;
    let mut raw: Vec<(Basis, Vec<usize>, (i32, i32))> = Vec::new();
    for c in 0..d - 1 {
        for r in 0..d - 1 {
            let basis = if (c + r) % 2 == 0 { Basis::X } else { Basis::Z };
            let support = vec![idx(c, r), idx(c, r + 1), idx(c + 1, r), idx(c + 1, r + 1)];
            raw.push((basis, support, (2 * c as i32 + 1, 2 * r as i32 + 1)));
        }
    }
    let top = 2 * d as i32 - 1;
    for c in 0..d - 1 {
        let x = 2 * c as i32 + 1;
        if (c + d - 2) % 2 == 1 {
            raw.push((Basis::X, vec![idx(c, d - 1), idx(c + 1, d - 1)], (x, top)));
        }
        if c % 2 == 1 {
            raw.push((Basis::X, vec![idx(c, 0), idx(c + 1, 0)], (x, -1)));
        }
    }
    for r in 0..d - 1 {
        let y = 2 * r as i32 + 1;
        if r % 2 == 0 {
            raw.push((Basis::Z, vec![idx(0, r), idx(0, r + 1)], (-1, y)));
        }
        if (d - 2 + r).is_multiple_of(2) {
            raw.push((Basis::Z, vec![idx(d - 1, r), idx(d - 1, r + 1)], (top, y)));
        }
    }
    raw.sort_by_key(|(_, _, center)| *center);
    let mut layout = Layout {
        d,
        x_plaquettes: Vec::new(),
        z_plaquettes: Vec::new(),
    };
    for (basis, mut support, center) in raw {
        support.sort_unstable();
        let list = match basis {
            Basis::X => &mut layout.x_plaquettes,
            Basis::Z => &mut layout.z_plaquettes,
        };
        list.push(Plaquette {
            id: format!("{}{}", basis.letter(), list.len()),
            ptype: basis,
            support,
            center,
        });
    }
    Ok(layout)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitState {
    Zero,
    Plus,
    /// `|0⟩ + i|1⟩`, the +1 eigenstate of Y.
    YState,
}

impl InitState {
    pub fn stabilizer(self) -> Pauli {
        match self {
            InitState::Zero => Pauli::Z,
            InitState::Plus => Pauli::X,
            InitState::YState => Pauli::Y,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InitPattern(Vec<InitState>);

impl InitPattern {
    pub fn new(states: Vec<InitState>) -> Self {
        InitPattern(states)
    }

    pub fn uniform(n: usize, state: InitState) -> Self {
        InitPattern(vec![state; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, q: usize) -> InitState {
        self.0[q]
    }

    pub fn states(&self) -> &[InitState] {
        &self.0
    }

    pub fn count(&self, state: InitState) -> usize {
        self.0.iter().filter(|&&s| s == state).count()
    }

    pub fn qubits_in(&self, state: InitState) -> Vec<usize> {
        (0..self.0.len()).filter(|&q| self.0[q] == state).collect()
    }
}

/// `|Y⟩` at the top-left corner, `|0⟩` strictly above the anti-diagonal
/// running from the top-left to the bottom-right corner, `|+⟩` elsewhere.
pub fn injection_pattern(layout: &Layout) -> InitPattern {
    let d = layout.distance();
    let states = (0..layout.num_qubits())
        .map(|q| {
            let (col, row) = layout.coords(q);
            if q == layout.corner() {
                InitState::YState
            } else if col > d - 1 - row {
                InitState::Zero
            } else {
                InitState::Plus
            }
        })
        .collect();
    InitPattern(states)
}

/// All `|0⟩` for `Basis::Z`, all `|+⟩` for `Basis::X`.
pub fn memory_pattern(layout: &Layout, basis: Basis) -> InitPattern {
    let state = match basis {
        Basis::Z => InitState::Zero,
        Basis::X => InitState::Plus,
    };
    InitPattern::uniform(layout.num_qubits(), state)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    MemoryZ,
    MemoryX,
    InjectY,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::MemoryZ, Scheme::MemoryX, Scheme::InjectY];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::MemoryZ => "memory-z",
            Scheme::MemoryX => "memory-x",
            Scheme::InjectY => "inject-y",
        }
    }

    pub fn pattern(self, layout: &Layout) -> InitPattern {
        match self {
            Scheme::MemoryZ => memory_pattern(layout, Basis::Z),
            Scheme::MemoryX => memory_pattern(layout, Basis::X),
            Scheme::InjectY => injection_pattern(layout),
        }
    }

    /// The logical operator whose value the scheme prepares as +1.
    pub fn logical(self, logicals: &Logicals) -> &PauliOperator {
        match self {
            Scheme::MemoryZ => &logicals.z,
            Scheme::MemoryX => &logicals.x,
            Scheme::InjectY => &logicals.y,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown scheme {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitSpec {
    layout: Layout,
    init: InitPattern,
    rounds: usize,
}

impl CircuitSpec {
    pub fn new(layout: Layout, init: InitPattern, rounds: usize) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::InvalidRounds);
        }
        if init.len() != layout.num_qubits() {
            return Err(Error::Config(format!(
                "init pattern has {} qubits, layout has {}",
                init.len(),
                layout.num_qubits()
            )));
        }
        Ok(CircuitSpec {
            layout,
            init,
            rounds,
        })
    }

    pub fn for_scheme(d: usize, scheme: Scheme, rounds: usize) -> Result<Self> {
        let layout = build_layout(d)?;
        let init = scheme.pattern(&layout);
        CircuitSpec::new(layout, init, rounds)
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn init(&self) -> &InitPattern {
        &self.init
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// The named scheme whose pattern this is, if any.
    pub fn scheme(&self) -> Option<Scheme> {
        Scheme::ALL
            .into_iter()
            .find(|s| s.pattern(&self.layout) == self.init)
    }
}

/// A measurement outcome label: round `k` (1-based) and plaquette id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CheckLabel {
    pub round: usize,
    pub plaquette: String,
}

impl CheckLabel {
    pub fn new(round: usize, plaquette: impl Into<String>) -> Self {
        CheckLabel {
            round,
            plaquette: plaquette.into(),
        }
    }

    pub fn id(&self) -> CheckId {
        CheckId::new(format!("r{}:{}", self.round, self.plaquette))
    }

    pub fn basis(&self) -> Basis {
        if self.plaquette.starts_with('X') {
            Basis::X
        } else {
            Basis::Z
        }
    }

    pub fn parse(id: &CheckId) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed check id {:?}", id.as_str()));
        let rest = id.as_str().strip_prefix('r').ok_or_else(bad)?;
        let (round, plaquette) = rest.split_once(':').ok_or_else(bad)?;
        let round: usize = round.parse().map_err(|_| bad())?;
        let valid = plaquette.len() > 1
            && (plaquette.starts_with('X') || plaquette.starts_with('Z'))
            && plaquette[1..].chars().all(|c| c.is_ascii_digit());
        if round == 0 || !valid {
            return Err(bad());
        }
        Ok(CheckLabel::new(round, plaquette))
    }
}

/// Diagram layer of the `basis` measurements in round `round`.
pub fn measurement_layer(round: usize, basis: Basis) -> usize {
    match basis {
        Basis::X => 2 * round - 1,
        Basis::Z => 2 * round,
    }
}

pub fn output_layer(rounds: usize) -> usize {
    2 * rounds + 1
}

pub fn data_node(q: usize, layer: usize) -> NodeId {
    NodeId::new(format!("q{q}:{layer}"))
}

pub fn ancilla_node(plaquette: &str, layer: usize) -> NodeId {
    NodeId::new(format!("a{plaquette}:{layer}"))
}

pub fn stub_node(plaquette: &str, layer: usize) -> NodeId {
    NodeId::new(format!("m{plaquette}:{layer}"))
}

pub fn output_node(q: usize) -> NodeId {
    NodeId::new(format!("out{q}"))
}

/// Where a surface-diagram node sits in the circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeRole {
    Data { qubit: usize, layer: usize },
    Ancilla { plaquette: String, layer: usize },
    Stub { plaquette: String, layer: usize },
    Output { qubit: usize },
}

impl NodeRole {
    pub fn parse(id: &NodeId) -> Option<NodeRole> {
        let s = id.as_str();
        if let Some(q) = s.strip_prefix("out") {
            return q.parse().ok().map(|qubit| NodeRole::Output { qubit });
        }
        let (head, layer) = s.split_once(':')?;
        let layer: usize = layer.parse().ok()?;
        let (tag, body) = head.split_at(1.min(head.len()));
        match tag {
            "q" => body
                .parse()
                .ok()
                .map(|qubit| NodeRole::Data { qubit, layer }),
            "a" => Some(NodeRole::Ancilla {
                plaquette: body.to_owned(),
                layer,
            }),
            "m" => Some(NodeRole::Stub {
                plaquette: body.to_owned(),
                layer,
            }),
            _ => None,
        }
    }
}

fn init_kind(state: InitState) -> NodeKind {
    match state {
        InitState::Plus => NodeKind::z(Phase::ZERO),
        InitState::Zero => NodeKind::x(Phase::ZERO),
        InitState::YState => NodeKind::z(Phase::HALF_PI),
    }
}

/// Builds the layered diagram: init spiders at layer 0, an X layer then a Z
/// layer per round, and one open output leg per data qubit.
pub fn build_diagram(spec: &CircuitSpec) -> Diagram {
    let layout = &spec.layout;
    let n = layout.num_qubits();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let data_pos = |q: usize, layer: usize| {
        let (c, r) = layout.coords(q);
        Pos::new(2 * c as i32, 2 * r as i32, layer as i32)
    };

    let mut last: Vec<NodeId> = Vec::with_capacity(n);
    for q in 0..n {
        let id = data_node(q, 0);
        nodes.push(Node::new(
            id.clone(),
            init_kind(spec.init.get(q)),
            data_pos(q, 0),
        ));
        last.push(id);
    }

    for round in 1..=spec.rounds {
        for basis in [Basis::X, Basis::Z] {
            let layer = measurement_layer(round, basis);
            let plaquettes = layout.plaquettes_of(basis);
            let mut covered = vec![false; n];
            for p in plaquettes {
                for &q in &p.support {
                    covered[q] = true;
                }
            }
            // Data spiders share the measured Pauli's colour.
            let (data_kind, ancilla_kind) = match basis {
                Basis::X => (NodeKind::x(Phase::ZERO), NodeKind::z(Phase::ZERO)),
                Basis::Z => (NodeKind::z(Phase::ZERO), NodeKind::x(Phase::ZERO)),
            };
            for q in (0..n).filter(|&q| covered[q]) {
                let id = data_node(q, layer);
                nodes.push(Node::new(id.clone(), data_kind.clone(), data_pos(q, layer)));
                edges.push(Edge::plain(last[q].clone(), id.clone()));
                last[q] = id;
            }
            for p in plaquettes {
                let pos = Pos::new(p.center.0, p.center.1, layer as i32);
                let ancilla = ancilla_node(&p.id, layer);
                let stub = stub_node(&p.id, layer);
                let check = CheckLabel::new(round, p.id.clone()).id();
                nodes.push(Node::new(ancilla.clone(), ancilla_kind.clone(), pos));
                nodes.push(Node::new(stub.clone(), NodeKind::MeasureOut { check }, pos));
                edges.push(Edge::plain(ancilla.clone(), stub));
                for &q in &p.support {
                    edges.push(Edge::plain(ancilla.clone(), data_node(q, layer)));
                }
            }
        }
    }

    let top = output_layer(spec.rounds);
    for q in 0..n {
        let id = output_node(q);
        nodes.push(Node::new(
            id.clone(),
            NodeKind::BoundaryOut,
            data_pos(q, top),
        ));
        edges.push(Edge::plain(last[q].clone(), id));
    }

    let mut metadata = BTreeMap::new();
    metadata.insert("distance".to_owned(), layout.distance().to_string());
    metadata.insert("rounds".to_owned(), spec.rounds.to_string());
    metadata.insert(
        "scheme".to_owned(),
        spec.scheme().map_or("custom", Scheme::name).to_owned(),
    );
    Diagram::new(nodes, edges, metadata)
}

/// Closed-form node count of [`build_diagram`].
pub fn expected_node_count(d: usize, rounds: usize) -> usize {
    2 * d * d + rounds * (4 * d * d - 2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Logicals {
    pub z: PauliOperator,
    pub x: PauliOperator,
    pub y: PauliOperator,
}

/// `Z_L` along the top row, `X_L` along column 0, and `Y_L = -i·Z_L·X_L`,
/// which is `+Y` on the corner they share.
pub fn logical_operators(layout: &Layout) -> Logicals {
    let d = layout.distance();
    let n = layout.num_qubits();
    let top: Vec<usize> = (0..d).map(|c| layout.index(c, d - 1)).collect();
    let left: Vec<usize> = (0..d).map(|r| layout.index(0, r)).collect();
    let z = PauliOperator::uniform(n, Pauli::Z, top);
    let x = PauliOperator::uniform(n, Pauli::X, left);
    let (k, zx) = z.mul_with_phase(&x);
    // -i · i^k must be real.
    let y = zx
        .absorb_phase((k + 3) % 4)
        .expect("Z_L and X_L anticommute");
    Logicals { z, x, y }
}

#[derive(Serialize)]
struct QubitDoc {
    index: usize,
    col: usize,
    row: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    init: Option<InitState>,
}

#[derive(Serialize)]
struct PlaquetteDoc<'a> {
    id: &'a str,
    #[serde(rename = "type")]
    ptype: Basis,
    support: &'a [usize],
    center: [i32; 2],
}

#[derive(Serialize)]
struct LogicalsDoc {
    z: String,
    x: String,
    y: String,
}

#[derive(Serialize)]
struct LayoutDoc<'a> {
    version: u32,
    distance: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    scheme: Option<&'a str>,
    qubits: Vec<QubitDoc>,
    plaquettes: Vec<PlaquetteDoc<'a>>,
    logicals: LogicalsDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    deterministic_checks: Option<&'a [CheckId]>,
}

/// Optional per-scheme annotations of a layout document.
pub struct LayoutAnnotations<'a> {
    pub scheme: Scheme,
    pub init: &'a InitPattern,
    pub deterministic_checks: &'a [CheckId],
}

/// JSON layout document: qubits, plaquettes, logical operators and, when
/// given, the init pattern and deterministic checks of a scheme.
pub fn layout_document(layout: &Layout, annotations: Option<&LayoutAnnotations<'_>>) -> String {
    let logicals = logical_operators(layout);
    let doc = LayoutDoc {
        version: 1,
        distance: layout.distance(),
        scheme: annotations.map(|a| a.scheme.name()),
        qubits: (0..layout.num_qubits())
            .map(|q| {
                let (col, row) = layout.coords(q);
                QubitDoc {
                    index: q,
                    col,
                    row,
                    init: annotations.map(|a| a.init.get(q)),
                }
            })
            .collect(),
        plaquettes: layout
            .plaquettes()
            .map(|p| PlaquetteDoc {
                id: &p.id,
                ptype: p.ptype,
                support: &p.support,
                center: [p.center.0, p.center.1],
            })
            .collect(),
        logicals: LogicalsDoc {
            z: logicals.z.to_string(),
            x: logicals.x.to_string(),
            y: logicals.y.to_string(),
        },
        deterministic_checks: annotations.map(|a| a.deterministic_checks),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("layout document serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn supports(ps: &[Plaquette]) -> Vec<Vec<usize>> {
        ps.iter().map(|p| p.support.clone()).collect()
    }

    #[test]
    fn plaquette_counts() {
        for d in [3, 5, 7, 9] {
            let l = build_layout(d).unwrap();
            let half = (d * d - 1) / 2;
            for basis in [Basis::X, Basis::Z] {
                let ps = l.plaquettes_of(basis);
                assert_eq!(ps.len(), half);
                assert_eq!(ps.iter().filter(|p| p.weight() == 2).count(), d - 1);
            }
        }
        assert!(build_layout(4).is_err());
        assert!(build_layout(1).is_err());
    }

    #[test]
    fn d3_geometry() {
        let l = build_layout(3).unwrap();
        assert_eq!(
            supports(l.x_plaquettes()),
            vec![vec![0, 1, 3, 4], vec![2, 5], vec![3, 6], vec![4, 5, 7, 8]]
        );
        assert_eq!(
            supports(l.z_plaquettes()),
            vec![vec![0, 1], vec![1, 2, 4, 5], vec![3, 4, 6, 7], vec![7, 8]]
        );
    }

    #[test]
    fn corner_touches_one_z_face_and_one_x_edge() {
        let l = build_layout(5).unwrap();
        let c = l.corner();
        let touching: Vec<_> = l.plaquettes().filter(|p| p.support.contains(&c)).collect();
        assert_eq!(touching.len(), 2);
        assert!(touching
            .iter()
            .any(|p| p.ptype == Basis::Z && p.weight() == 4));
        assert!(touching
            .iter()
            .any(|p| p.ptype == Basis::X && p.weight() == 2));
    }

    #[test]
    fn interior_faces_checkerboard() {
        let l = build_layout(5).unwrap();
        let mut faces = BTreeMap::new();
        for p in l.plaquettes().filter(|p| p.weight() == 4) {
            assert!(faces.insert(p.center, p.ptype).is_none());
        }
        assert_eq!(faces.len(), 16);
        for (&(x, y), &t) in &faces {
            if let Some(&right) = faces.get(&(x + 2, y)) {
                assert_ne!(t, right);
            }
            if let Some(&up) = faces.get(&(x, y + 2)) {
                assert_ne!(t, up);
            }
        }
    }

    #[test]
    fn injection_pattern_d3() {
        let l = build_layout(3).unwrap();
        let p = injection_pattern(&l);
        assert_eq!(p.qubits_in(InitState::YState), vec![2]);
        assert_eq!(p.qubits_in(InitState::Zero), vec![5, 7, 8]);
        assert_eq!(p.qubits_in(InitState::Plus), vec![0, 1, 3, 4, 6]);
    }

    #[test]
    fn logical_operators_d3() {
        let l = build_layout(3).unwrap();
        let lg = logical_operators(&l);
        assert_eq!(lg.y.to_string(), "+X0 X1 Y2 Z5 Z8");
        assert!(!lg.z.commutes_with(&lg.x));
    }

    #[test]
    fn check_label_roundtrip() {
        let label = CheckLabel::new(3, "Z11");
        assert_eq!(label.id().as_str(), "r3:Z11");
        assert_eq!(CheckLabel::parse(&label.id()).unwrap(), label);
        for bad in ["r0:X1", "3:X1", "r1:Y1", "r1:X", "r1-X1"] {
            assert!(CheckLabel::parse(&CheckId::new(bad)).is_err(), "{bad}");
        }
    }

    #[test]
    fn node_roles_parse() {
        assert_eq!(
            NodeRole::parse(&data_node(9, 0)),
            Some(NodeRole::Data { qubit: 9, layer: 0 })
        );
        assert_eq!(
            NodeRole::parse(&stub_node("X3", 1)),
            Some(NodeRole::Stub {
                plaquette: "X3".into(),
                layer: 1
            })
        );
        assert_eq!(
            NodeRole::parse(&output_node(4)),
            Some(NodeRole::Output { qubit: 4 })
        );
    }

    #[test]
    fn memory_diagram_d3_two_rounds() {
        let spec = CircuitSpec::for_scheme(3, Scheme::MemoryZ, 2).unwrap();
        let d = build_diagram(&spec);
        let stubs = d
            .nodes()
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::MeasureOut { .. }))
            .count();
        assert_eq!(stubs, 16);
        assert!(d.validate().is_empty());
        assert_eq!(d.meta("scheme"), Some("memory-z"));
        assert!(matches!(
            CircuitSpec::for_scheme(3, Scheme::MemoryZ, 0),
            Err(Error::InvalidRounds)
        ));
    }

    proptest! {
        #[test]
        fn layout_algebra(d in prop::sample::select(vec![3usize, 5, 7, 9])) {
            let l = build_layout(d).unwrap();
            let n = l.num_qubits();
            let ops: Vec<_> = l.plaquettes().map(|p| p.operator(n)).collect();
            let lg = logical_operators(&l);
            for a in &ops {
                for b in &ops {
                    prop_assert!(a.commutes_with(b));
                }
                for logical in [&lg.x, &lg.y, &lg.z] {
                    prop_assert!(a.commutes_with(logical));
                }
            }
            prop_assert!(!lg.z.commutes_with(&lg.x));
            prop_assert_eq!(lg.y.get(l.corner()), Some(Pauli::Y));
            prop_assert!(!lg.y.is_negative());
        }

        #[test]
        fn node_count_closed_form(
            d in prop::sample::select(vec![3usize, 5, 7]),
            rounds in 1usize..4,
            scheme in prop::sample::select(Scheme::ALL.to_vec()),
        ) {
            let diagram = build_diagram(&CircuitSpec::for_scheme(d, scheme, rounds).unwrap());
            prop_assert_eq!(diagram.nodes().len(), expected_node_count(d, rounds));
            prop_assert!(diagram.validate().is_empty());
            let mut checks = std::collections::HashSet::new();
            for node in diagram.nodes() {
                if let Some(check) = node.kind.check() {
                    let label = CheckLabel::parse(check).unwrap();
                    prop_assert!(label.round >= 1 && label.round <= rounds);
                    prop_assert!(build_layout(d).unwrap().plaquette(&label.plaquette).is_some());
                    prop_assert!(checks.insert(check.clone()));
                }
            }
        }

        #[test]
        fn injection_counts(d in prop::sample::select(vec![3usize, 5, 7, 9, 11])) {
            let p = injection_pattern(&build_layout(d).unwrap());
            prop_assert_eq!(p.count(InitState::Zero), d * (d - 1) / 2);
            prop_assert_eq!(p.count(InitState::Plus), d * (d + 1) / 2 - 1);
            prop_assert_eq!(p.count(InitState::YState), 1);
        }
    }
}
