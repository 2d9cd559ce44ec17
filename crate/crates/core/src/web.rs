//! Pauli webs: two-colour edge highlightings that satisfy every spider's
//! rule, computed as the solution space of a GF(2) linear system.
//!
//! Each edge `e` carries two variables, `x_e` (red) and `z_e` (green); a
//! `Y` highlight sets both. For a spider with own-colour bit `o` and
//! opposite-colour bit `p` the rules are
//!
//! * `p` is equal on all legs;
//! * `Σ o = [phase is ±π/2] · p` over the legs.
//!
//! Boundary legs and measurement stubs are unconstrained. Webs carry
//! supports only; signs are left to the stabilizer oracle.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{rref, BitVec, LinearSystem};
use crate::pauli::{Pauli, PauliOperator};
use crate::zx::{self, CheckId, Diagram, NodeId, NodeKind, SpiderColor};

/// The highlight of one edge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Highlight {
    #[default]
    None,
    X,
    Z,
    Y,
}

impl Highlight {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Highlight::None,
            (true, false) => Highlight::X,
            (false, true) => Highlight::Z,
            (true, true) => Highlight::Y,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Highlight::None => (false, false),
            Highlight::X => (true, false),
            Highlight::Z => (false, true),
            Highlight::Y => (true, true),
        }
    }

    pub fn pauli(self) -> Option<Pauli> {
        let (x, z) = self.bits();
        Pauli::from_bits(x, z)
    }

    pub fn from_pauli(p: Option<Pauli>) -> Self {
        p.map_or(Highlight::None, |p| {
            let (x, z) = p.bits();
            Highlight::from_bits(x, z)
        })
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Highlight::None => "I",
            Highlight::X => "X",
            Highlight::Z => "Z",
            Highlight::Y => "Y",
        }
    }
}

impl FromStr for Highlight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "-" | "none" => Ok(Highlight::None),
            "X" => Ok(Highlight::X),
            "Z" => Ok(Highlight::Z),
            "Y" => Ok(Highlight::Y),
            _ => Err(Error::Parse(format!("unknown highlight {s:?}"))),
        }
    }
}

pub fn x_var(edge: usize) -> usize {
    2 * edge
}

pub fn z_var(edge: usize) -> usize {
    2 * edge + 1
}

fn fingerprint(d: &Diagram) -> u64 {
    let mut h = DefaultHasher::new();
    for e in d.edges() {
        e.a.hash(&mut h);
        e.b.hash(&mut h);
    }
    h.finish()
}

/// Boundary legs in web order: inputs then outputs, each column-major by
/// position. For surface diagrams output `i` is data qubit `i`.
pub fn boundary_legs(d: &Diagram) -> Vec<usize> {
    let mut legs: Vec<usize> = d
        .legs()
        .filter(|&i| matches!(d.node(i).kind, NodeKind::BoundaryIn | NodeKind::BoundaryOut))
        .collect();
    legs.sort_by_key(|&i| {
        let n = d.node(i);
        (
            matches!(n.kind, NodeKind::BoundaryOut),
            n.pos.col,
            n.pos.row,
            n.id.clone(),
        )
    });
    legs
}

/// Measurement stubs in canonical node order.
pub fn stub_legs(d: &Diagram) -> Vec<usize> {
    d.legs()
        .filter(|&i| matches!(d.node(i).kind, NodeKind::MeasureOut { .. }))
        .collect()
}

/// The bit a stub can carry: the colour opposite to the spider it hangs on.
/// Returns the variable that must vanish on the stub edge.
fn stub_own_var(d: &Diagram, stub: usize) -> Option<usize> {
    let e = d.leg_edge(stub)?;
    let spider = d.other_end(e, stub);
    match d.node(spider).kind.as_spider()?.0 {
        SpiderColor::Z => Some(z_var(e)),
        SpiderColor::X => Some(x_var(e)),
    }
}

/// A valid highlighting together with its restriction to the diagram's legs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Web {
    x: BitVec,
    z: BitVec,
    fingerprint: u64,
    boundary: PauliOperator,
    stubs: Vec<CheckId>,
}

impl Web {
    /// The all-`None` web.
    pub fn empty(d: &Diagram) -> Web {
        let m = d.num_edges();
        Web::from_bits(d, BitVec::zeros(m), BitVec::zeros(m))
    }

    pub fn from_bits(d: &Diagram, x: BitVec, z: BitVec) -> Web {
        assert_eq!(x.len(), d.num_edges());
        assert_eq!(z.len(), d.num_edges());
        let legs = boundary_legs(d);
        let mut boundary = PauliOperator::identity(legs.len());
        let mut terms = Vec::new();
        for (k, &leg) in legs.iter().enumerate() {
            if let Some(e) = d.leg_edge(leg) {
                if let Some(p) = Pauli::from_bits(x.get(e), z.get(e)) {
                    terms.push((k, p));
                }
            }
        }
        if !terms.is_empty() {
            boundary = PauliOperator::from_terms(legs.len(), terms);
        }
        let stubs = stub_legs(d)
            .into_iter()
            .filter(|&s| d.leg_edge(s).is_some_and(|e| x.get(e) || z.get(e)))
            .filter_map(|s| d.node(s).kind.check().cloned())
            .collect();
        Web {
            x,
            z,
            fingerprint: fingerprint(d),
            boundary,
            stubs,
        }
    }

    /// Interleaved `[x_0, z_0, x_1, z_1, ...]` solution vector.
    fn from_solution(d: &Diagram, v: &BitVec) -> Web {
        let m = d.num_edges();
        let mut x = BitVec::zeros(m);
        let mut z = BitVec::zeros(m);
        for i in v.iter_ones() {
            if i % 2 == 0 {
                x.set(i / 2, true);
            } else {
                z.set(i / 2, true);
            }
        }
        Web::from_bits(d, x, z)
    }

    /// Builds a web from highlights named by edge endpoints. Unlisted edges
    /// are `None`.
    pub fn from_highlights<'a>(
        d: &Diagram,
        highlights: impl IntoIterator<Item = (&'a NodeId, &'a NodeId, Highlight)>,
    ) -> Result<Web> {
        let m = d.num_edges();
        let (mut x, mut z) = (BitVec::zeros(m), BitVec::zeros(m));
        for (a, b, h) in highlights {
            let e = d
                .edge_between(a, b)
                .ok_or_else(|| Error::ForeignWeb(format!("no edge {a}-{b}")))?;
            let (hx, hz) = h.bits();
            x.set(e, hx);
            z.set(e, hz);
        }
        Ok(Web::from_bits(d, x, z))
    }

    pub fn num_edges(&self) -> usize {
        self.x.len()
    }

    pub fn highlight(&self, edge: usize) -> Highlight {
        Highlight::from_bits(self.x.get(edge), self.z.get(edge))
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    /// Indices of highlighted edges.
    pub fn highlighted_edges(&self) -> Vec<usize> {
        (0..self.num_edges())
            .filter(|&e| self.x.get(e) || self.z.get(e))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Highlights on the boundary legs, indexed as in [`boundary_legs`].
    pub fn boundary_restriction(&self) -> &PauliOperator {
        &self.boundary
    }

    /// Highlighted measurement stubs.
    pub fn stub_set(&self) -> &[CheckId] {
        &self.stubs
    }

    pub fn belongs_to(&self, d: &Diagram) -> bool {
        self.num_edges() == d.num_edges() && self.fingerprint == fingerprint(d)
    }

    fn check_owner(&self, d: &Diagram) -> Result<()> {
        if self.belongs_to(d) {
            Ok(())
        } else {
            Err(Error::ForeignWeb(format!(
                "web over {} edges does not match the diagram's {} edges",
                self.num_edges(),
                d.num_edges()
            )))
        }
    }

    /// The edgewise sum of two webs over the same diagram.
    pub fn xor(&self, d: &Diagram, other: &Web) -> Result<Web> {
        self.check_owner(d)?;
        other.check_owner(d)?;
        let mut x = self.x.clone();
        let mut z = self.z.clone();
        x.xor_assign(&other.x);
        z.xor_assign(&other.z);
        Ok(Web::from_bits(d, x, z))
    }
}

/// The spider rules as equations, with the spider behind each equation.
#[derive(Clone, Debug)]
pub struct SpiderConstraints {
    pub system: LinearSystem,
    /// Spider node index per equation.
    pub spiders: Vec<usize>,
}

/// One equality per extra leg and one parity equation per spider, in node
/// order. Variables are interleaved: `x_e = 2e`, `z_e = 2e + 1`.
pub fn spider_constraints(d: &Diagram) -> SpiderConstraints {
    let mut system = LinearSystem::new(2 * d.num_edges());
    let mut spiders = Vec::new();
    for s in d.spiders() {
        let (color, phase) = d.node(s).kind.as_spider().expect("spider");
        let (own, opp): (fn(usize) -> usize, fn(usize) -> usize) = match color {
            SpiderColor::Z => (z_var, x_var),
            SpiderColor::X => (x_var, z_var),
        };
        let legs = d.incident(s);
        let Some(&first) = legs.first() else {
            continue;
        };
        for &e in &legs[1..] {
            system.push_sum([opp(first), opp(e)], false);
            spiders.push(s);
        }
        let mut parity: Vec<usize> = legs.iter().map(|&e| own(e)).collect();
        if phase.is_half() {
            parity.push(opp(first));
        }
        system.push_sum(parity, false);
        spiders.push(s);
    }
    SpiderConstraints { system, spiders }
}

/// Checks every spider rule directly. Returns the ids of violated spiders.
pub fn validate_web(d: &Diagram, w: &Web) -> Result<Vec<NodeId>> {
    w.check_owner(d)?;
    let mut bad = Vec::new();
    for s in d.spiders() {
        let (color, phase) = d.node(s).kind.as_spider().expect("spider");
        let legs = d.incident(s);
        let (own, opp) = match color {
            SpiderColor::Z => (&w.z, &w.x),
            SpiderColor::X => (&w.x, &w.z),
        };
        let p = legs.first().is_some_and(|&e| opp.get(e));
        let uniform = legs.iter().all(|&e| opp.get(e) == p);
        let parity = legs.iter().filter(|&&e| own.get(e)).count() % 2 == 1;
        if !uniform || parity != (phase.is_half() && p) {
            bad.push(d.node(s).id.clone());
        }
    }
    bad.sort();
    Ok(bad)
}

/// Basis of all webs of a diagram.
#[derive(Clone, Debug)]
pub struct WebSpace {
    pub basis: Vec<Web>,
    /// Rank of the constraint system.
    pub rank: usize,
    pub num_variables: usize,
}

impl WebSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

pub fn web_space(d: &Diagram) -> WebSpace {
    let constraints = spider_constraints(d);
    let echelon = constraints.system.eliminate();
    WebSpace {
        basis: echelon
            .null_space()
            .iter()
            .map(|v| Web::from_solution(d, v))
            .collect(),
        rank: echelon.rank(),
        num_variables: constraints.system.nvars(),
    }
}

/// Required highlights on some legs. Stubs left unspecified may carry only
/// their outcome colour; boundary legs left unspecified are free.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundaryCondition {
    legs: BTreeMap<NodeId, Highlight>,
}

impl BoundaryCondition {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, d: &Diagram, leg: &NodeId, h: Highlight) -> Result<()> {
        let idx = d
            .node_index(leg)
            .ok_or_else(|| Error::BoundaryCondition(format!("no node {leg}")))?;
        if d.leg_edge(idx).is_none() {
            return Err(Error::BoundaryCondition(format!(
                "{leg} is not a degree-1 leg"
            )));
        }
        self.legs.insert(leg.clone(), h);
        Ok(())
    }

    /// Every boundary leg fixed to the operator's Pauli there (`None` off
    /// its support). The operator is indexed as in [`boundary_legs`].
    pub fn from_operator(d: &Diagram, op: &PauliOperator) -> Result<Self> {
        let legs = boundary_legs(d);
        if op.num_qubits() != legs.len() {
            return Err(Error::BoundaryCondition(format!(
                "operator on {} qubits, diagram has {} boundary legs",
                op.num_qubits(),
                legs.len()
            )));
        }
        let mut bc = Self::new();
        for (k, &leg) in legs.iter().enumerate() {
            bc.set(d, &d.node(leg).id, Highlight::from_pauli(op.get(k)))?;
        }
        Ok(bc)
    }

    pub fn get(&self, leg: &NodeId) -> Option<Highlight> {
        self.legs.get(leg).copied()
    }

    pub fn legs(&self) -> &BTreeMap<NodeId, Highlight> {
        &self.legs
    }
}

/// Why a boundary condition admits no web: an irreducible subset of
/// constraints whose sum is `0 = 1`, named by the spiders and legs they
/// come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub spiders: Vec<NodeId>,
    pub legs: Vec<NodeId>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ids: &[NodeId]| {
            ids.iter()
                .map(NodeId::as_str)
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(
            f,
            "inconsistent rules at spiders [{}] given legs [{}]",
            join(&self.spiders),
            join(&self.legs)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Web(Web),
    Infeasible(Witness),
}

impl Solution {
    pub fn web(self) -> Option<Web> {
        match self {
            Solution::Web(w) => Some(w),
            Solution::Infeasible(_) => None,
        }
    }
}

/// The canonical web matching `bc` (free variables zero in variable order),
/// or a witness of infeasibility.
pub fn solve(d: &Diagram, bc: &BoundaryCondition) -> Result<Solution> {
    let SpiderConstraints {
        mut system,
        spiders,
    } = spider_constraints(d);
    let n_spider_eqs = system.len();
    let mut leg_of_eq = Vec::new();
    for (id, &h) in bc.legs() {
        let leg = d
            .node_index(id)
            .ok_or_else(|| Error::BoundaryCondition(format!("no node {id}")))?;
        let e = d
            .leg_edge(leg)
            .ok_or_else(|| Error::BoundaryCondition(format!("{id} is not a degree-1 leg")))?;
        let (hx, hz) = h.bits();
        system.push_sum([x_var(e)], hx);
        system.push_sum([z_var(e)], hz);
        leg_of_eq.extend([leg, leg]);
    }
    for stub in stub_legs(d) {
        if bc.get(&d.node(stub).id).is_none() {
            if let Some(var) = stub_own_var(d, stub) {
                system.push_sum([var], false);
                leg_of_eq.push(stub);
            }
        }
    }
    match system.solve() {
        Ok(v) => Ok(Solution::Web(Web::from_solution(d, &v))),
        Err(eqs) => {
            let eqs = system.minimize_witness(&eqs);
            let mut witness = Witness {
                spiders: Vec::new(),
                legs: Vec::new(),
            };
            for i in eqs {
                if i < n_spider_eqs {
                    witness.spiders.push(d.node(spiders[i]).id.clone());
                } else {
                    witness
                        .legs
                        .push(d.node(leg_of_eq[i - n_spider_eqs]).id.clone());
                }
            }
            for ids in [&mut witness.spiders, &mut witness.legs] {
                ids.sort();
                ids.dedup();
            }
            Ok(Solution::Infeasible(witness))
        }
    }
}

/// Reduced basis of the webs with no boundary highlight and a nonempty
/// stub set.
///
/// Each stub set is written in difference coordinates along its
/// plaquette's chain of rounds (coordinate `k` is the parity of rounds
/// `≥ k`), with columns in chronological order; the basis is the reduced
/// row-echelon form there. Initial checks and consecutive-round pairs are
/// unit vectors in these coordinates.
pub fn detectors(d: &Diagram) -> Vec<Web> {
    let SpiderConstraints { mut system, .. } = spider_constraints(d);
    for leg in boundary_legs(d) {
        if let Some(e) = d.leg_edge(leg) {
            system.push_sum([x_var(e)], false);
            system.push_sum([z_var(e)], false);
        }
    }
    let stubs = stub_legs(d);
    for &stub in &stubs {
        if let Some(var) = stub_own_var(d, stub) {
            system.push_sum([var], false);
        }
    }
    let null = system.eliminate().null_space();

    // Chains: stubs grouped by the spider position they hang over, in
    // layer order. Column order is chronological across chains.
    let mut chains: BTreeMap<(i32, i32), Vec<usize>> = BTreeMap::new();
    for (k, &s) in stubs.iter().enumerate() {
        let p = d.node(s).pos;
        chains.entry((p.col, p.row)).or_default().push(k);
    }
    let mut successor: Vec<Option<usize>> = vec![None; stubs.len()];
    for chain in chains.values_mut() {
        chain.sort_by_key(|&k| d.node(stubs[k]).pos.layer);
        for pair in chain.windows(2) {
            successor[pair[0]] = Some(pair[1]);
        }
    }
    // Stub indices are already in layer order.
    let ns = stubs.len();
    let nv = system.nvars();
    let mut rows: Vec<BitVec> = null
        .iter()
        .map(|v| {
            let mut row = BitVec::zeros(ns + nv);
            let on: Vec<bool> = stubs
                .iter()
                .map(|&s| {
                    d.leg_edge(s)
                        .is_some_and(|e| v.get(x_var(e)) || v.get(z_var(e)))
                })
                .collect();
            // Suffix parity along each chain.
            for k in (0..ns).rev() {
                let next = successor[k].is_some_and(|j| row.get(j));
                row.set(k, on[k] ^ next);
            }
            for i in v.iter_ones() {
                row.set(ns + i, true);
            }
            row
        })
        .collect();
    let rank = rref(&mut rows, ns).len();
    rows.truncate(rank);
    rows.iter()
        .map(|row| Web::from_solution(d, &row.slice(ns, nv)))
        .collect()
}

/// Insertions of π-phase spiders on edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PauliErrorSet {
    insertions: Vec<(usize, Pauli)>,
}

impl PauliErrorSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `pauli` on the edge `a`-`b`, which must not be a stub edge.
    pub fn push(&mut self, d: &Diagram, a: &NodeId, b: &NodeId, pauli: Pauli) -> Result<()> {
        let e = d
            .edge_between(a, b)
            .ok_or_else(|| Error::ErrorInsertion(format!("no edge {a}-{b}")))?;
        self.push_edge(d, e, pauli)
    }

    pub fn push_edge(&mut self, d: &Diagram, edge: usize, pauli: Pauli) -> Result<()> {
        if edge >= d.num_edges() {
            return Err(Error::ErrorInsertion(format!(
                "edge index {edge} out of range"
            )));
        }
        let (a, b) = d.endpoints(edge);
        let on_stub = [a, b]
            .iter()
            .any(|&i| matches!(d.node(i).kind, NodeKind::MeasureOut { .. }));
        if on_stub {
            return Err(Error::ErrorInsertion(format!(
                "edge {}-{} is a measurement stub",
                d.node(a).id,
                d.node(b).id
            )));
        }
        self.insertions.push((edge, pauli));
        Ok(())
    }

    pub fn insertions(&self) -> &[(usize, Pauli)] {
        &self.insertions
    }

    pub fn len(&self) -> usize {
        self.insertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.insertions.is_empty()
    }

    /// Parses `P@a/b`, e.g. `X@q9:0/q9:1`.
    pub fn parse_insertion(d: &Diagram, text: &str) -> Result<(usize, Pauli)> {
        let bad = || Error::Parse(format!("expected P@node/node, got {text:?}"));
        let (p, ends) = text.split_once('@').ok_or_else(bad)?;
        let (a, b) = ends.split_once('/').ok_or_else(bad)?;
        let pauli: Pauli = p.parse()?;
        let e = d
            .edge_between(&NodeId::new(a), &NodeId::new(b))
            .ok_or_else(|| Error::ErrorInsertion(format!("no edge {a}-{b}")))?;
        Ok((e, pauli))
    }
}

/// Edges that may carry an error: everything but stub edges.
pub fn error_edges(d: &Diagram) -> Vec<usize> {
    (0..d.num_edges())
        .filter(|&e| {
            let (a, b) = d.endpoints(e);
            !matches!(d.node(a).kind, NodeKind::MeasureOut { .. })
                && !matches!(d.node(b).kind, NodeKind::MeasureOut { .. })
        })
        .collect()
}

/// Bit `i` is set iff the errors anticommute with web `i` an odd number of
/// times.
pub fn syndrome(d: &Diagram, webs: &[Web], err: &PauliErrorSet) -> Result<BitVec> {
    let mut out = BitVec::zeros(webs.len());
    for (i, w) in webs.iter().enumerate() {
        w.check_owner(d)?;
        let mut flip = false;
        for &(e, p) in err.insertions() {
            let (ex, ez) = p.bits();
            flip ^= (ex & w.z.get(e)) ^ (ez & w.x.get(e));
        }
        out.set(i, flip);
    }
    Ok(out)
}

#[derive(Serialize)]
struct WebLine<'a> {
    name: &'a str,
    boundary: String,
    stubs: &'a [CheckId],
    highlights: Vec<[&'a str; 3]>,
}

#[derive(Deserialize)]
struct WebLineIn {
    name: String,
    highlights: Vec<[String; 3]>,
}

#[derive(Deserialize)]
struct WebsOnly {
    #[serde(default)]
    webs: Vec<WebLineIn>,
}

/// The diagram document with a `webs` list appended, one web per line.
pub fn webs_document(d: &Diagram, webs: &[(String, &Web)]) -> Result<String> {
    let mut lines = Vec::with_capacity(webs.len());
    for (name, w) in webs {
        w.check_owner(d)?;
        let highlights = w
            .highlighted_edges()
            .into_iter()
            .map(|e| {
                let edge = &d.edges()[e];
                [edge.a.as_str(), edge.b.as_str(), w.highlight(e).symbol()]
            })
            .collect();
        let line = WebLine {
            name,
            boundary: w.boundary_restriction().to_string(),
            stubs: w.stub_set(),
            highlights,
        };
        lines.push(serde_json::to_string(&line).expect("web line serializes"));
    }
    Ok(zx::serialize_with(d, Some(("webs", &lines))))
}

/// Reads a document written by [`webs_document`].
pub fn read_webs_document(text: &str) -> Result<(Diagram, Vec<(String, Web)>)> {
    let d = zx::deserialize(text)?;
    let doc: WebsOnly = serde_json::from_str(text).map_err(zx::document_error)?;
    let mut webs = Vec::new();
    for (k, line) in doc.webs.into_iter().enumerate() {
        let mut parsed = Vec::with_capacity(line.highlights.len());
        for [a, b, h] in line.highlights {
            let h: Highlight = h
                .parse()
                .map_err(|e| Error::Parse(format!("webs[{k}]: {e}")))?;
            parsed.push((NodeId::new(a), NodeId::new(b), h));
        }
        let web = Web::from_highlights(&d, parsed.iter().map(|(a, b, h)| (a, b, *h)))
            .map_err(|e| Error::Parse(format!("webs[{k}]: {e}")))?;
        webs.push((line.name, web));
    }
    Ok((d, webs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zx::{Edge, Node, Phase, Pos};
    use proptest::prelude::*;

    fn diagram(nodes: Vec<Node>, edges: Vec<Edge>) -> Diagram {
        Diagram::new(nodes, edges, BTreeMap::new())
    }

    fn minimal_y() -> Diagram {
        diagram(
            vec![
                Node::new("y", NodeKind::z(Phase::HALF_PI), Pos::new(0, 0, 0)),
                Node::new("out", NodeKind::BoundaryOut, Pos::new(0, 0, 1)),
            ],
            vec![Edge::plain("y", "out")],
        )
    }

    fn wire() -> Diagram {
        diagram(
            vec![
                Node::new("in", NodeKind::BoundaryIn, Pos::new(0, 0, 0)),
                Node::new("s", NodeKind::z(Phase::ZERO), Pos::new(0, 0, 1)),
                Node::new("out", NodeKind::BoundaryOut, Pos::new(0, 0, 2)),
            ],
            vec![Edge::plain("in", "s"), Edge::plain("s", "out")],
        )
    }

    /// One spider on one boundary leg; returns the allowed highlights.
    fn allowed_terminations(kind: NodeKind) -> Vec<Highlight> {
        let d = diagram(
            vec![
                Node::new("s", kind, Pos::new(0, 0, 0)),
                Node::new("out", NodeKind::BoundaryOut, Pos::new(0, 0, 1)),
            ],
            vec![Edge::plain("s", "out")],
        );
        [Highlight::None, Highlight::X, Highlight::Z, Highlight::Y]
            .into_iter()
            .filter(|&h| {
                let w = Web::from_highlights(&d, [(&"s".into(), &"out".into(), h)]).unwrap();
                validate_web(&d, &w).unwrap().is_empty()
            })
            .collect()
    }

    #[test]
    fn termination_rules() {
        assert_eq!(
            allowed_terminations(NodeKind::z(Phase::ZERO)),
            vec![Highlight::None, Highlight::X]
        );
        assert_eq!(
            allowed_terminations(NodeKind::x(Phase::ZERO)),
            vec![Highlight::None, Highlight::Z]
        );
        assert_eq!(
            allowed_terminations(NodeKind::z(Phase::HALF_PI)),
            vec![Highlight::None, Highlight::Y]
        );
        assert_eq!(
            allowed_terminations(NodeKind::z(Phase::PI)),
            vec![Highlight::None, Highlight::X]
        );
    }

    #[test]
    fn minimal_y_space() {
        let d = minimal_y();
        let space = web_space(&d);
        assert_eq!(space.dimension(), 1);
        assert_eq!(space.basis[0].highlight(0), Highlight::Y);
        assert_eq!(space.rank + space.dimension(), 2 * d.num_edges());
    }

    #[test]
    fn wire_space_has_x_and_z_through() {
        let d = wire();
        let space = web_space(&d);
        assert_eq!(space.dimension(), 2);
        let mut through: Vec<_> = space
            .basis
            .iter()
            .map(|w| (w.highlight(0), w.highlight(1)))
            .collect();
        through.sort();
        assert_eq!(
            through,
            vec![(Highlight::X, Highlight::X), (Highlight::Z, Highlight::Z)]
        );
    }

    #[test]
    fn empty_condition_gives_empty_web() {
        let d = wire();
        let w = solve(&d, &BoundaryCondition::new()).unwrap().web().unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn x_ancilla_three_of_four_is_flagged() {
        let mut nodes = vec![
            Node::new("a", NodeKind::x(Phase::ZERO), Pos::new(1, 1, 1)),
            Node::new(
                "m",
                NodeKind::MeasureOut { check: "c".into() },
                Pos::new(1, 1, 1),
            ),
        ];
        let mut edges = vec![Edge::plain("a", "m")];
        for k in 0..4 {
            let id = format!("q{k}");
            nodes.push(Node::new(
                id.clone(),
                NodeKind::BoundaryOut,
                Pos::new(k, 0, 1),
            ));
            edges.push(Edge::plain("a", id));
        }
        let d = diagram(nodes, edges);
        let ids: Vec<NodeId> = (0..4).map(|k| NodeId::new(format!("q{k}"))).collect();
        let a = NodeId::new("a");
        let all_four = Web::from_highlights(&d, ids.iter().map(|q| (&a, q, Highlight::Z))).unwrap();
        let m = NodeId::new("m");
        let with_stub = all_four.xor(
            &d,
            &Web::from_highlights(&d, [(&a, &m, Highlight::Z)]).unwrap(),
        );
        assert_eq!(
            validate_web(&d, &with_stub.unwrap()).unwrap(),
            Vec::<NodeId>::new()
        );
        let three =
            Web::from_highlights(&d, ids[..3].iter().map(|q| (&a, q, Highlight::Z))).unwrap();
        assert_eq!(validate_web(&d, &three).unwrap(), vec![a]);
    }

    #[test]
    fn infeasible_witness_names_the_y_spider() {
        let d = minimal_y();
        let mut bc = BoundaryCondition::new();
        bc.set(&d, &"out".into(), Highlight::Z).unwrap();
        match solve(&d, &bc).unwrap() {
            Solution::Infeasible(w) => {
                assert_eq!(w.spiders, vec![NodeId::new("y")]);
                assert_eq!(w.legs, vec![NodeId::new("out")]);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
        assert!(bc.set(&d, &"y".into(), Highlight::X).is_err());
    }

    #[test]
    fn foreign_web_is_rejected() {
        let w = Web::empty(&wire());
        assert!(validate_web(&minimal_y(), &w).is_err());
    }

    #[test]
    fn syndrome_rules() {
        let d = wire();
        let x_web = Web::from_highlights(
            &d,
            [
                (&"in".into(), &"s".into(), Highlight::X),
                (&"s".into(), &"out".into(), Highlight::X),
            ],
        )
        .unwrap();
        let webs = vec![x_web];
        let mut err = PauliErrorSet::new();
        assert!(syndrome(&d, &webs, &err).unwrap().is_zero());
        err.push_edge(&d, 0, Pauli::Z).unwrap();
        assert!(syndrome(&d, &webs, &err).unwrap().get(0));
        let mut x = PauliErrorSet::new();
        x.push_edge(&d, 0, Pauli::X).unwrap();
        assert!(!syndrome(&d, &webs, &x).unwrap().get(0));
    }

    #[test]
    fn webs_document_roundtrip() {
        let d = wire();
        let space = web_space(&d);
        let named: Vec<(String, &Web)> = space
            .basis
            .iter()
            .enumerate()
            .map(|(k, w)| (format!("w{k}"), w))
            .collect();
        let text = webs_document(&d, &named).unwrap();
        let (back, webs) = read_webs_document(&text).unwrap();
        assert_eq!(back, d);
        assert_eq!(webs.len(), 2);
        for ((_, a), (_, b)) in webs.iter().zip(&named) {
            assert_eq!(a, *b);
        }
    }

    fn random_diagram() -> impl Strategy<Value = Diagram> {
        // Random small graphs of spiders with a few boundary legs.
        (
            2usize..7,
            prop::collection::vec((0usize..7, 0usize..7), 1..12),
            prop::collection::vec((any::<bool>(), 0u8..4), 7),
        )
            .prop_map(|(n, pairs, kinds)| {
                let mut nodes = Vec::new();
                let mut edges = Vec::new();
                for k in 0..n {
                    let (z, phase) = kinds[k];
                    let kind = if z {
                        NodeKind::z(Phase::new(phase as i64))
                    } else {
                        NodeKind::x(Phase::new(phase as i64))
                    };
                    nodes.push(Node::new(format!("s{k}"), kind, Pos::new(k as i32, 0, 0)));
                    let out = format!("o{k}");
                    nodes.push(Node::new(
                        out.clone(),
                        NodeKind::BoundaryOut,
                        Pos::new(k as i32, 0, 1),
                    ));
                    edges.push(Edge::plain(format!("s{k}"), out));
                }
                let mut seen = std::collections::HashSet::new();
                for (a, b) in pairs {
                    let (a, b) = (a % n, b % n);
                    if a != b && seen.insert((a.min(b), a.max(b))) {
                        edges.push(Edge::plain(format!("s{a}"), format!("s{b}")));
                    }
                }
                Diagram::new(nodes, edges, BTreeMap::new())
            })
    }

    proptest! {
        #[test]
        fn basis_webs_are_valid_and_closed_under_xor(d in random_diagram(), picks in prop::collection::vec(any::<bool>(), 32)) {
            prop_assert!(d.validate().is_empty());
            let space = web_space(&d);
            prop_assert_eq!(space.rank + space.dimension(), 2 * d.num_edges());
            let mut acc = Web::empty(&d);
            for (w, &pick) in space.basis.iter().zip(&picks) {
                prop_assert!(validate_web(&d, w).unwrap().is_empty());
                if pick {
                    acc = acc.xor(&d, w).unwrap();
                }
            }
            prop_assert!(validate_web(&d, &acc).unwrap().is_empty());
        }

        #[test]
        fn single_bit_mutations_are_caught(d in random_diagram(), pick in any::<prop::sample::Index>(), bit in any::<prop::sample::Index>()) {
            let space = web_space(&d);
            prop_assume!(space.dimension() > 0);
            let w = pick.get(&space.basis);
            let e = bit.index(d.num_edges());
            let (mut x, mut z) = (w.x_bits().clone(), w.z_bits().clone());
            if bit.index(2) == 0 { x.toggle(e) } else { z.toggle(e) }
            let mutated = Web::from_bits(&d, x, z);
            let var = if bit.index(2) == 0 { x_var(e) } else { z_var(e) };
            let system = spider_constraints(&d).system;
            let constrained = (0..system.len()).any(|i| system.equation(i).0.get(var));
            prop_assert_eq!(!validate_web(&d, &mutated).unwrap().is_empty(), constrained);
        }

        #[test]
        fn syndrome_is_additive(d in random_diagram(), e in any::<prop::sample::Index>()) {
            let webs = web_space(&d).basis;
            let e = e.index(d.num_edges());
            let mut y = PauliErrorSet::new();
            y.push_edge(&d, e, Pauli::Y).unwrap();
            let mut xz = PauliErrorSet::new();
            xz.push_edge(&d, e, Pauli::X).unwrap();
            xz.push_edge(&d, e, Pauli::Z).unwrap();
            prop_assert_eq!(syndrome(&d, &webs, &y).unwrap(), syndrome(&d, &webs, &xz).unwrap());
        }
    }
}
