//! Lowering of surface diagrams to prepare/measure/apply programs, shot
//! execution, and exact outcome analysis by forced-outcome runs.

use std::collections::{BTreeSet, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::tableau::{prepare, Measurement, Tableau};
use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::pauli::PauliOperator;
use crate::surface::{
    build_diagram, build_layout, data_node, measurement_layer, Basis, CheckLabel, CircuitSpec,
    InitPattern, InitState, Layout, NodeRole, Scheme,
};
use crate::web::PauliErrorSet;
use crate::zx::{CheckId, Diagram, NodeKind, Phase, SpiderColor};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instruction {
    Prepare(InitPattern),
    /// Measure `op`; `flip` inverts the recorded bit.
    Measure {
        check: CheckId,
        op: PauliOperator,
        flip: bool,
    },
    Apply(PauliOperator),
}

#[derive(Clone, Debug)]
pub struct Program {
    spec: CircuitSpec,
    instructions: Vec<Instruction>,
    checks: Vec<CheckId>,
    check_index: HashMap<CheckId, usize>,
}

/// Recovers the circuit spec of a diagram built by [`build_diagram`].
pub fn recognize(d: &Diagram) -> Result<CircuitSpec> {
    let unrecognized = |msg: String| Error::UnrecognizedStructure(msg);
    let meta = |key: &str| -> Result<usize> {
        d.meta(key)
            .ok_or_else(|| unrecognized(format!("missing metadata {key:?}")))?
            .parse()
            .map_err(|_| unrecognized(format!("metadata {key:?} is not an integer")))
    };
    let (distance, rounds) = (meta("distance")?, meta("rounds")?);
    let layout = build_layout(distance).map_err(|e| unrecognized(e.to_string()))?;
    let mut states = Vec::with_capacity(layout.num_qubits());
    for q in 0..layout.num_qubits() {
        let node = d
            .node_by_id(&data_node(q, 0))
            .ok_or_else(|| unrecognized(format!("no init spider for qubit {q}")))?;
        let state = match node.kind.as_spider() {
            Some((SpiderColor::Z, Phase::ZERO)) => InitState::Plus,
            Some((SpiderColor::X, Phase::ZERO)) => InitState::Zero,
            Some((SpiderColor::Z, Phase::HALF_PI)) => InitState::YState,
            _ => {
                return Err(unrecognized(format!(
                    "{} is not a known init state",
                    node.id
                )))
            }
        };
        states.push(state);
    }
    let spec = CircuitSpec::new(layout, InitPattern::new(states), rounds)
        .map_err(|e| unrecognized(e.to_string()))?;
    if build_diagram(&spec) != *d {
        return Err(unrecognized(
            "diagram differs from the builder's output for its metadata".to_owned(),
        ));
    }
    Ok(spec)
}

/// [`lower_with_errors`] without errors.
pub fn lower(d: &Diagram) -> Result<Program> {
    lower_with_errors(d, &PauliErrorSet::new())
}

/// Lowers a surface diagram. An error on a world-line edge leaving layer
/// `L` acts on the data qubit right after layer `L`. On a plaquette edge,
/// the part matching the data spider's colour acts on the data qubit and
/// the part matching the ancilla's colour flips that check's record.
pub fn lower_with_errors(d: &Diagram, err: &PauliErrorSet) -> Result<Program> {
    let spec = recognize(d)?;
    let layout = spec.layout().clone();
    let n = layout.num_qubits();
    let slots = 2 * spec.rounds() + 1;
    let mut applies: Vec<Vec<PauliOperator>> = vec![Vec::new(); slots];
    let mut flips: BTreeSet<CheckId> = BTreeSet::new();

    for &(e, pauli) in err.insertions() {
        let (a, b) = d.endpoints(e);
        let roles = (
            NodeRole::parse(&d.node(a).id),
            NodeRole::parse(&d.node(b).id),
        );
        let bad = || {
            Error::ErrorInsertion(format!(
                "edge {}-{} cannot carry an error",
                d.node(a).id,
                d.node(b).id
            ))
        };
        let (px, pz) = pauli.bits();
        match roles {
            (Some(NodeRole::Data { qubit, layer }), Some(NodeRole::Data { .. }))
            | (Some(NodeRole::Data { qubit, layer }), Some(NodeRole::Output { .. })) => {
                applies[layer].push(PauliOperator::from_terms(n, [(qubit, pauli)]));
            }
            (Some(NodeRole::Data { qubit, layer }), Some(NodeRole::Ancilla { plaquette, .. }))
            | (Some(NodeRole::Ancilla { plaquette, .. }), Some(NodeRole::Data { qubit, layer })) => {
                let basis = if layer % 2 == 1 { Basis::X } else { Basis::Z };
                let (data_part, record_part) = match basis {
                    Basis::X => (px, pz),
                    Basis::Z => (pz, px),
                };
                if data_part {
                    applies[layer].push(PauliOperator::from_terms(n, [(qubit, basis.pauli())]));
                }
                if record_part {
                    let check = CheckLabel::new(layer.div_ceil(2), plaquette).id();
                    if !flips.remove(&check) {
                        flips.insert(check);
                    }
                }
            }
            _ => return Err(bad()),
        }
    }

    let mut instructions = vec![Instruction::Prepare(spec.init().clone())];
    let mut checks = Vec::new();
    instructions.extend(applies[0].drain(..).map(Instruction::Apply));
    for round in 1..=spec.rounds() {
        for basis in [Basis::X, Basis::Z] {
            for p in layout.plaquettes_of(basis) {
                let check = CheckLabel::new(round, p.id.clone()).id();
                checks.push(check.clone());
                instructions.push(Instruction::Measure {
                    flip: flips.contains(&check),
                    check,
                    op: p.operator(n),
                });
            }
            let layer = measurement_layer(round, basis);
            instructions.extend(applies[layer].drain(..).map(Instruction::Apply));
        }
    }
    let check_index = checks
        .iter()
        .enumerate()
        .map(|(k, c)| (c.clone(), k))
        .collect();
    Ok(Program {
        spec,
        instructions,
        checks,
        check_index,
    })
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Checks that must all read +1 for the shot to be accepted.
    pub postselect: Option<BTreeSet<CheckId>>,
    /// Measured after the last round.
    pub measure_logical: Option<PauliOperator>,
    /// Checks whose parity corrects the logical outcome.
    pub frame: Option<Vec<CheckId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShotRecord {
    pub shot: u64,
    /// Check ids in measurement order.
    pub checks: Vec<CheckId>,
    /// `true` is a −1 parity.
    pub outcomes: Vec<bool>,
    /// Whether each outcome was forced by the state.
    pub forced: Vec<bool>,
    pub accepted: Option<bool>,
    /// Raw logical outcome.
    pub logical_y: Option<bool>,
    /// Logical outcome times the frame parity.
    pub logical_y_corrected: Option<bool>,
}

impl ShotRecord {
    pub fn outcome(&self, check: &CheckId) -> Option<bool> {
        self.checks
            .iter()
            .position(|c| c == check)
            .map(|k| self.outcomes[k])
    }

    /// One JSON object per line.
    pub fn to_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            shot: u64,
            accepted: Option<bool>,
            logical_y: Option<u8>,
            logical_y_corrected: Option<u8>,
            outcomes: &'a str,
        }
        let bits: String = self
            .outcomes
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        serde_json::to_string(&Line {
            shot: self.shot,
            accepted: self.accepted,
            logical_y: self.logical_y.map(u8::from),
            logical_y_corrected: self.logical_y_corrected.map(u8::from),
            outcomes: &bits,
        })
        .expect("shot record serializes")
    }
}

/// Per-shot generator: stream = shot, word position = instruction index.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

impl Program {
    pub fn spec(&self) -> &CircuitSpec {
        &self.spec
    }

    pub fn layout(&self) -> &Layout {
        self.spec.layout()
    }

    pub fn num_qubits(&self) -> usize {
        self.layout().num_qubits()
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    /// Check ids in measurement order.
    pub fn checks(&self) -> &[CheckId] {
        &self.checks
    }

    pub fn check_position(&self, check: &CheckId) -> Result<usize> {
        self.check_index
            .get(check)
            .copied()
            .ok_or_else(|| Error::UnknownCheck(check.to_string()))
    }

    pub fn scheme(&self) -> Option<Scheme> {
        self.spec.scheme()
    }

    /// Runs every instruction. `choose(k)` may force the outcome of the
    /// `k`-th measurement (the logical one is last) if it is random.
    fn simulate(
        &self,
        logical: Option<&PauliOperator>,
        rng: &mut ChaCha8Rng,
        mut choose: impl FnMut(usize) -> Option<bool>,
    ) -> (Vec<Measurement>, Option<Measurement>) {
        let mut t = Tableau::new(self.num_qubits());
        let mut out = Vec::with_capacity(self.checks.len());
        for (idx, ins) in self.instructions.iter().enumerate() {
            match ins {
                Instruction::Prepare(pattern) => t = prepare(pattern),
                Instruction::Apply(p) => t.apply_pauli(p),
                Instruction::Measure { op, flip, .. } => {
                    rng.set_word_pos(4 * idx as u128);
                    let mut m = t.measure(op, choose(out.len()), rng);
                    m.outcome ^= flip;
                    out.push(m);
                }
            }
            debug_assert!(t.check_invariants().is_ok());
        }
        let logical = logical.map(|p| {
            rng.set_word_pos(4 * self.instructions.len() as u128);
            t.measure(p, choose(out.len()), rng)
        });
        (out, logical)
    }

    /// One shot with random outcomes drawn from `(seed, shot)`.
    pub fn execute(&self, seed: u64, shot: u64, opts: &RunOptions) -> Result<ShotRecord> {
        let postselect = opts
            .postselect
            .as_ref()
            .map(|set| {
                set.iter()
                    .map(|c| self.check_position(c))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        let frame = opts
            .frame
            .as_ref()
            .map(|set| {
                set.iter()
                    .map(|c| self.check_position(c))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        if let Some(p) = &opts.measure_logical {
            if p.num_qubits() != self.num_qubits() {
                return Err(Error::Config(format!(
                    "logical operator on {} qubits, circuit has {}",
                    p.num_qubits(),
                    self.num_qubits()
                )));
            }
        }
        let mut rng = shot_rng(seed, shot);
        let (ms, logical) = self.simulate(opts.measure_logical.as_ref(), &mut rng, |_| None);
        let outcomes: Vec<bool> = ms.iter().map(|m| m.outcome).collect();
        let parity = |idx: &[usize]| idx.iter().fold(false, |acc, &k| acc ^ outcomes[k]);
        let logical_y = logical.map(|m| m.outcome);
        Ok(ShotRecord {
            shot,
            checks: self.checks.clone(),
            forced: ms.iter().map(|m| m.deterministic).collect(),
            accepted: postselect
                .as_deref()
                .map(|idx| idx.iter().all(|&k| !outcomes[k])),
            logical_y,
            logical_y_corrected: logical_y.map(|l| l ^ frame.as_deref().is_some_and(parity)),
            outcomes,
        })
    }

    /// Check outcomes with every random outcome forced to +1.
    pub fn analyze_forced_zero(&self) -> Vec<bool> {
        let mut rng = shot_rng(0, 0);
        let (ms, _) = self.simulate(None, &mut rng, |_| Some(false));
        ms.iter().map(|m| m.outcome).collect()
    }

    /// A copy with extra Paulis applied right after state preparation.
    pub fn with_init_errors(&self, errors: &[PauliOperator]) -> Program {
        let mut program = self.clone();
        let tail = program.instructions.split_off(1);
        program
            .instructions
            .extend(errors.iter().cloned().map(Instruction::Apply));
        program.instructions.extend(tail);
        program
    }

    /// Every outcome as an affine function of the random ones.
    pub fn analyze(&self, logical: Option<&PauliOperator>) -> OutcomeAnalysis {
        let mut rng = shot_rng(0, 0);
        let (base, base_logical) = self.simulate(logical, &mut rng, |_| Some(false));
        let mut all = base.clone();
        all.extend(base_logical);
        let random: Vec<usize> = (0..all.len()).filter(|&k| !all[k].deterministic).collect();
        let m = all.len();
        let mut dependence = vec![BitVec::zeros(random.len()); m];
        for (j, &r) in random.iter().enumerate() {
            let (ms, l) = self.simulate(logical, &mut rng, |k| Some(k == r));
            for (k, meas) in ms.iter().chain(l.iter()).enumerate() {
                if meas.outcome != all[k].outcome {
                    dependence[k].set(j, true);
                }
            }
        }
        OutcomeAnalysis {
            checks: self.checks.clone(),
            constant: all.iter().map(|m| m.outcome).collect(),
            forced: all.iter().map(|m| m.deterministic).collect(),
            random,
            dependence,
            has_logical: logical.is_some(),
        }
    }
}

/// Outcome `k` equals `constant[k] + dependence[k] · r`, where `r` are the
/// random outcomes in measurement order. A logical measurement, when
/// requested, is the last entry.
#[derive(Clone, Debug)]
pub struct OutcomeAnalysis {
    pub checks: Vec<CheckId>,
    pub constant: Vec<bool>,
    pub forced: Vec<bool>,
    pub random: Vec<usize>,
    pub dependence: Vec<BitVec>,
    pub has_logical: bool,
}

impl OutcomeAnalysis {
    pub fn logical_index(&self) -> Option<usize> {
        self.has_logical.then_some(self.checks.len())
    }

    /// Value of the parity of the given outcomes, if it is deterministic.
    pub fn parity(&self, indices: impl IntoIterator<Item = usize>) -> Option<bool> {
        let mut dep = BitVec::zeros(self.random.len());
        let mut value = false;
        for k in indices {
            dep.xor_assign(&self.dependence[k]);
            value ^= self.constant[k];
        }
        dep.is_zero().then_some(value)
    }

    /// Dimension of the space of deterministic check-outcome parities.
    pub fn deterministic_dimension(&self) -> usize {
        let rows = &self.dependence[..self.checks.len()];
        self.checks.len() - crate::gf2::rank(rows)
    }
}

/// Checks whose outcome is forced to +1 on the error-free circuit, in
/// measurement order. Only round 1 unless `all_rounds`.
pub fn deterministic_checks(d: &Diagram, all_rounds: bool) -> Result<Vec<CheckId>> {
    let program = lower(d)?;
    let analysis = program.analyze(None);
    Ok(program
        .checks()
        .iter()
        .enumerate()
        .filter(|&(k, c)| {
            let round_ok = all_rounds || CheckLabel::parse(c).is_ok_and(|l| l.round == 1);
            round_ok && analysis.forced[k] && analysis.parity([k]) == Some(false)
        })
        .map(|(_, c)| c.clone())
        .collect())
}

/// The same plaquettes in every round.
pub fn repeat_in_all_rounds(checks: &[CheckId], rounds: usize) -> Result<Vec<CheckId>> {
    let mut out = BTreeSet::new();
    for c in checks {
        let label = CheckLabel::parse(c)?;
        for round in 1..=rounds {
            out.insert(CheckLabel::new(round, label.plaquette.clone()));
        }
    }
    Ok(out.into_iter().map(|l| l.id()).collect())
}

/// `run` for a diagram with errors: lower, then execute one shot.
pub fn run(
    d: &Diagram,
    err: &PauliErrorSet,
    seed: u64,
    shot: u64,
    opts: &RunOptions,
) -> Result<ShotRecord> {
    lower_with_errors(d, err)?.execute(seed, shot, opts)
}

/// Whether a diagram node is a measurement stub of a surface diagram.
pub fn is_stub(d: &Diagram, idx: usize) -> bool {
    matches!(d.node(idx).kind, NodeKind::MeasureOut { .. })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;
    use crate::surface::{build_layout, logical_operators};

    fn diagram(d: usize, scheme: Scheme, rounds: usize) -> Diagram {
        build_diagram(&CircuitSpec::for_scheme(d, scheme, rounds).unwrap())
    }

    fn measures(p: &Program) -> usize {
        p.instructions()
            .iter()
            .filter(|i| matches!(i, Instruction::Measure { .. }))
            .count()
    }

    #[test]
    fn lowering_counts() {
        let p = lower(&diagram(3, Scheme::MemoryZ, 1)).unwrap();
        assert_eq!(p.instructions().len(), 9);
        assert!(matches!(p.instructions()[0], Instruction::Prepare(_)));
        assert_eq!(measures(&p), 8);
        let p = lower(&diagram(5, Scheme::InjectY, 1)).unwrap();
        assert_eq!(measures(&p), 24);
        assert_eq!(p.checks()[0].as_str(), "r1:X0");
        assert_eq!(p.checks()[12].as_str(), "r1:Z0");
    }

    #[test]
    fn init_error_lands_after_prepare() {
        let d = diagram(5, Scheme::MemoryZ, 1);
        let mut err = PauliErrorSet::new();
        err.push(&d, &data_node(9, 0), &data_node(9, 1), Pauli::X)
            .unwrap();
        let p = lower_with_errors(&d, &err).unwrap();
        assert_eq!(
            p.instructions()[1],
            Instruction::Apply(PauliOperator::from_terms(25, [(9, Pauli::X)]))
        );
    }

    #[test]
    fn foreign_diagrams_are_rejected() {
        let d = diagram(3, Scheme::MemoryZ, 1);
        let mut meta = d.metadata().clone();
        meta.insert("rounds".into(), "2".into());
        let altered = Diagram::new(d.nodes().to_vec(), d.edges().to_vec(), meta);
        assert!(matches!(
            lower(&altered),
            Err(Error::UnrecognizedStructure(_))
        ));
    }

    #[test]
    fn memory_z_first_round() {
        let d = diagram(5, Scheme::MemoryZ, 1);
        let checks = deterministic_checks(&d, false).unwrap();
        let expected: Vec<CheckId> = (0..12)
            .map(|k| CheckLabel::new(1, format!("Z{k}")).id())
            .collect();
        assert_eq!(checks, expected);
    }

    #[test]
    fn runs_are_reproducible() {
        let d = diagram(3, Scheme::InjectY, 2);
        let opts = RunOptions {
            measure_logical: Some(logical_operators(&build_layout(3).unwrap()).x),
            ..Default::default()
        };
        let a = run(&d, &PauliErrorSet::new(), 11, 3, &opts).unwrap();
        let b = run(&d, &PauliErrorSet::new(), 11, 3, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_line(), b.to_line());
    }

    #[test]
    fn unknown_postselect_check_is_an_error() {
        let d = diagram(3, Scheme::MemoryZ, 1);
        let opts = RunOptions {
            postselect: Some(BTreeSet::from([CheckId::new("r9:X0")])),
            ..Default::default()
        };
        assert!(matches!(
            run(&d, &PauliErrorSet::new(), 0, 0, &opts),
            Err(Error::UnknownCheck(_))
        ));
    }

    #[test]
    fn repeated_checks_follow_history() {
        // Round-2 X checks of a Z memory repeat the random round-1 values.
        let p = lower(&diagram(3, Scheme::MemoryZ, 2)).unwrap();
        let a = p.analyze(None);
        let r1 = p.check_position(&CheckId::new("r1:X0")).unwrap();
        let r2 = p.check_position(&CheckId::new("r2:X0")).unwrap();
        assert_eq!(a.parity([r1]), None);
        assert_eq!(a.parity([r1, r2]), Some(false));
        assert!(a.forced[r2]);
    }
}
