//! Cross-checks between the web solver and the tableau oracle.

use std::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::Result;
use crate::gf2::{self, BitVec};
use crate::oracle::deterministic_checks;
use crate::oracle::sim::{
    lower, lower_with_errors, shot_rng, OutcomeAnalysis, Program, RunOptions,
};
use crate::oracle::tableau::{canonical_group, prepare, PauliRow};
use crate::pauli::{Pauli, PauliOperator};
use crate::surface::{
    build_diagram, logical_operators, CheckLabel, CircuitSpec, InitPattern, InitState, Scheme,
};
use crate::web::{
    detectors, error_edges, solve, syndrome, validate_web, web_space, BoundaryCondition,
    PauliErrorSet, Solution, Web,
};
use crate::zx::{CheckId, Diagram, SpiderColor};

/// First-round checks post-selected for `|Y⟩` injection at distance 5.
pub const INJECTION_D5_POSTSELECT: [&str; 10] = [
    "r1:X0", "r1:X1", "r1:X3", "r1:X4", "r1:X6", "r1:X9", "r1:Z7", "r1:Z9", "r1:Z10", "r1:Z11",
];

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub distance: usize,
    pub rounds: usize,
    pub scheme: Scheme,
    pub seed: u64,
    /// Error-free shots for the sampled checks.
    pub samples: usize,
    /// Every single X and Z insertion on every eligible edge.
    pub exhaustive_errors: bool,
    /// Random one- or two-insertion error sets when not exhaustive.
    pub error_samples: usize,
    pub four_qubit: bool,
}

impl VerifyConfig {
    pub fn new(distance: usize, rounds: usize, scheme: Scheme) -> Self {
        VerifyConfig {
            distance,
            rounds,
            scheme,
            seed: 0,
            samples: 200,
            exhaustive_errors: false,
            error_samples: 500,
            four_qubit: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.to_owned(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

/// Stub sets of webs as outcome-index vectors.
pub fn stub_vectors(program: &Program, webs: &[Web]) -> Result<Vec<BitVec>> {
    webs.iter()
        .map(|w| {
            let idx = w
                .stub_set()
                .iter()
                .map(|c| program.check_position(c))
                .collect::<Result<Vec<_>>>()?;
            Ok(BitVec::from_indices(program.checks().len(), idx))
        })
        .collect()
}

/// Outcomes with every random measurement forced to +1.
pub fn reference_outcomes(program: &Program) -> Vec<bool> {
    program.analyze_forced_zero()
}

/// Outcome flips caused by `err`, against the error-free reference.
pub fn oracle_flips(d: &Diagram, reference: &[bool], err: &PauliErrorSet) -> Result<Vec<bool>> {
    let with = lower_with_errors(d, err)?.analyze_forced_zero();
    Ok(reference.iter().zip(&with).map(|(a, b)| a ^ b).collect())
}

fn parity(vector: &BitVec, outcomes: &[bool]) -> bool {
    vector.iter_ones().fold(false, |acc, k| acc ^ outcomes[k])
}

/// Detectors' stub sets span exactly the deterministic outcome parities,
/// each with value +1.
pub fn detectors_match_oracle(
    analysis: &OutcomeAnalysis,
    stubs: &[BitVec],
) -> std::result::Result<String, String> {
    for (i, s) in stubs.iter().enumerate() {
        match analysis.parity(s.iter_ones()) {
            Some(false) => {}
            Some(true) => return Err(format!("detector {i} has parity -1")),
            None => return Err(format!("detector {i} is not deterministic")),
        }
    }
    let rank = gf2::rank(stubs);
    if rank != stubs.len() {
        return Err(format!("{} detectors but rank {rank}", stubs.len()));
    }
    let expected = analysis.deterministic_dimension();
    if rank != expected {
        return Err(format!(
            "detectors span {rank} dimensions, oracle finds {expected}"
        ));
    }
    Ok(format!("{rank} detectors span every deterministic parity"))
}

fn termination_violations(d: &Diagram, w: &Web) -> usize {
    d.spiders()
        .filter(|&s| d.degree(s) == 1)
        .filter(|&s| {
            let e = d.incident(s)[0];
            let (x, z) = (w.x_bits().get(e), w.z_bits().get(e));
            let (color, phase) = d.node(s).kind.as_spider().expect("spider");
            match (color, phase.is_half()) {
                (SpiderColor::Z, false) => z,
                (SpiderColor::X, false) => x,
                (SpiderColor::Z, true) | (SpiderColor::X, true) => x != z,
            }
        })
        .count()
}

/// Runs the cross-check suite for one circuit.
pub fn verify(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let spec = CircuitSpec::for_scheme(cfg.distance, cfg.scheme, cfg.rounds)?;
    let d = build_diagram(&spec);
    let mut out = Vec::new();

    let violations = d.validate();
    out.push(CheckResult::new(
        "diagram-valid",
        violations.is_empty(),
        format!(
            "{} nodes, {} edges, {} violations",
            d.nodes().len(),
            d.num_edges(),
            violations.len()
        ),
    ));

    let space = web_space(&d);
    let invalid = space
        .basis
        .iter()
        .filter(|w| !validate_web(&d, w).map(|v| v.is_empty()).unwrap_or(false))
        .count();
    let dims_ok = space.rank + space.dimension() == 2 * d.num_edges();
    out.push(CheckResult::new(
        "web-space",
        invalid == 0 && dims_ok,
        format!(
            "dimension {}, rank {}, 2|E| = {}, {} invalid basis webs",
            space.dimension(),
            space.rank,
            2 * d.num_edges(),
            invalid
        ),
    ));
    let bad_terms: usize = space
        .basis
        .iter()
        .map(|w| termination_violations(&d, w))
        .sum();
    out.push(CheckResult::new(
        "termination-rules",
        bad_terms == 0,
        format!("{bad_terms} degree-1 legs break their termination rule"),
    ));

    let program = lower(&d)?;
    let logicals = logical_operators(spec.layout());
    let logical = cfg.scheme.logical(&logicals).clone();
    let analysis = program.analyze(Some(&logical));
    let dets = detectors(&d);
    let stubs = stub_vectors(&program, &dets)?;
    let (ok, detail) = match detectors_match_oracle(&analysis, &stubs) {
        Ok(s) => (true, s),
        Err(s) => (false, s),
    };
    out.push(CheckResult::new("detectors-exact", ok, detail));

    let opts = RunOptions {
        measure_logical: Some(logical.clone()),
        ..Default::default()
    };
    let shots: Vec<_> = (0..cfg.samples as u64)
        .map(|s| program.execute(cfg.seed, s, &opts))
        .collect::<Result<_>>()?;
    let flipped = shots
        .iter()
        .filter(|r| stubs.iter().any(|s| parity(s, &r.outcomes)))
        .count();
    out.push(CheckResult::new(
        "detectors-sampled",
        flipped == 0,
        format!(
            "{flipped} of {} error-free shots flip a detector",
            shots.len()
        ),
    ));

    let bc = BoundaryCondition::from_operator(&d, &logical)?;
    match solve(&d, &bc)? {
        Solution::Web(w) => {
            let stub_vec = stub_vectors(&program, std::slice::from_ref(&w))?.remove(0);
            let li = analysis.logical_index().expect("logical requested");
            let exact = analysis.parity(stub_vec.iter_ones().chain([li]));
            out.push(CheckResult::new(
                "correlator-exact",
                exact == Some(false),
                format!(
                    "{} with stubs [{}]: {}",
                    logical,
                    join(w.stub_set()),
                    match exact {
                        Some(false) => "product is +1",
                        Some(true) => "product is -1",
                        None => "product is random",
                    }
                ),
            ));
            let bad = shots
                .iter()
                .filter(|r| parity(&stub_vec, &r.outcomes) ^ r.logical_y.expect("measured"))
                .count();
            out.push(CheckResult::new(
                "correlator-sampled",
                bad == 0,
                format!(
                    "{bad} of {} error-free shots violate the correlator",
                    shots.len()
                ),
            ));
        }
        Solution::Infeasible(witness) => {
            out.push(CheckResult::new(
                "correlator-exact",
                false,
                witness.to_string(),
            ));
        }
    }

    let reference = reference_outcomes(&program);
    let eligible = error_edges(&d);
    let mut cases: Vec<PauliErrorSet> = Vec::new();
    if cfg.exhaustive_errors {
        for &e in &eligible {
            for p in [Pauli::X, Pauli::Z] {
                let mut err = PauliErrorSet::new();
                err.push_edge(&d, e, p)?;
                cases.push(err);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.error_samples {
            let mut err = PauliErrorSet::new();
            for _ in 0..rng.random_range(1..=2) {
                let e = *eligible.choose(&mut rng).expect("diagram has edges");
                let p = *[Pauli::X, Pauli::Y, Pauli::Z]
                    .choose(&mut rng)
                    .expect("nonempty");
                err.push_edge(&d, e, p)?;
            }
            cases.push(err);
        }
    }
    let mut mismatches = 0;
    for err in &cases {
        let predicted = syndrome(&d, &dets, err)?;
        let flips = oracle_flips(&d, &reference, err)?;
        let observed: Vec<bool> = stubs.iter().map(|s| parity(s, &flips)).collect();
        if (0..dets.len()).any(|i| predicted.get(i) != observed[i]) {
            mismatches += 1;
        }
    }
    out.push(CheckResult::new(
        "syndrome-equivalence",
        mismatches == 0,
        format!(
            "{mismatches} mismatches over {} {} error sets",
            cases.len(),
            if cfg.exhaustive_errors {
                "exhaustive"
            } else {
                "random"
            }
        ),
    ));

    if cfg.scheme == Scheme::InjectY {
        let found = deterministic_checks(&d, false)?;
        let region = region_rule_checks(&spec);
        out.push(CheckResult::new(
            "postselect-region",
            found == region,
            format!("[{}] vs region rule [{}]", join(&found), join(&region)),
        ));
        if cfg.distance == 5 {
            let expected: Vec<CheckId> = INJECTION_D5_POSTSELECT
                .iter()
                .map(|&s| CheckId::new(s))
                .collect();
            out.push(CheckResult::new(
                "postselect-d5",
                found == expected,
                format!("[{}]", join(&found)),
            ));
        }
    }

    if cfg.four_qubit {
        out.extend(four_qubit_check(cfg.seed).checks());
    }
    Ok(out)
}

fn join(ids: &[CheckId]) -> String {
    ids.iter()
        .map(CheckId::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

/// First-round X checks supported only on `|+⟩` qubits and Z checks
/// supported only on `|0⟩` qubits, in measurement order.
pub fn region_rule_checks(spec: &CircuitSpec) -> Vec<CheckId> {
    let init = spec.init();
    spec.layout()
        .plaquettes()
        .filter(|p| {
            let want = match p.ptype {
                crate::surface::Basis::X => InitState::Plus,
                crate::surface::Basis::Z => InitState::Zero,
            };
            p.support.iter().all(|&q| init.get(q) == want)
        })
        .map(|p| CheckLabel::new(1, p.id.clone()).id())
        .collect()
}

/// Measuring `Z_a Z_b Z_c Z_d` on `⟨X_a, X_b, X_c, Z_d⟩`.
#[derive(Clone, Debug)]
pub struct FourQubitReport {
    pub shots: usize,
    pub ones: usize,
    pub both_in_first_100: bool,
    pub all_random: bool,
    pub chi_square: f64,
    pub p_value: f64,
    /// Shots whose post-measurement group differs from the expected one.
    pub group_mismatches: usize,
    pub expected_group: Vec<PauliOperator>,
}

impl FourQubitReport {
    pub fn checks(&self) -> Vec<CheckResult> {
        vec![
            CheckResult::new(
                "four-qubit-random",
                self.all_random && self.both_in_first_100,
                format!(
                    "{} random outcomes, both values within 100 shots: {}",
                    if self.all_random { "all" } else { "not all" },
                    self.both_in_first_100
                ),
            ),
            CheckResult::new(
                "four-qubit-chi-square",
                self.p_value > 1e-3,
                format!(
                    "{} ones in {} shots, chi2 = {:.3}, p = {:.4}",
                    self.ones, self.shots, self.chi_square, self.p_value
                ),
            ),
            CheckResult::new(
                "four-qubit-group",
                self.group_mismatches == 0,
                format!(
                    "{} mismatching shots; expected group for m = 0: [{}]",
                    self.group_mismatches,
                    self.expected_group
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            ),
        ]
    }
}

/// The four-qubit example with qubits `a, b, c, d = 0, 1, 2, 3` over 1000
/// seeded shots.
pub fn four_qubit_check(seed: u64) -> FourQubitReport {
    let shots = 1000;
    let pattern = InitPattern::new(vec![
        InitState::Plus,
        InitState::Plus,
        InitState::Plus,
        InitState::Zero,
    ]);
    let zzzz = PauliOperator::uniform(4, Pauli::Z, 0..4);
    let expected = |m: bool| {
        let rows = [
            zzzz.clone().with_sign(m),
            PauliOperator::uniform(4, Pauli::X, [0, 1]),
            PauliOperator::uniform(4, Pauli::X, [0, 2]),
            PauliOperator::uniform(4, Pauli::Z, [3]),
        ];
        canonical_group(rows.iter().map(PauliRow::from_operator).collect())
    };
    let mut ones = 0;
    let mut seen = [false; 2];
    let mut all_random = true;
    let mut mismatches = 0;
    for shot in 0..shots {
        let mut t = prepare(&pattern);
        let mut rng = shot_rng(seed, shot as u64);
        let m = t.measure(&zzzz, None, &mut rng);
        all_random &= !m.deterministic;
        ones += m.outcome as usize;
        if shot < 100 {
            seen[m.outcome as usize] = true;
        }
        if t.canonical_form() != expected(m.outcome) {
            mismatches += 1;
        }
    }
    let e = shots as f64 / 2.0;
    let chi_square = [(shots - ones) as f64, ones as f64]
        .iter()
        .map(|o| (o - e).powi(2) / e)
        .sum::<f64>();
    let dist = ChiSquared::new(1.0).expect("one degree of freedom");
    FourQubitReport {
        shots,
        ones,
        both_in_first_100: seen[0] && seen[1],
        all_random,
        chi_square,
        p_value: 1.0 - dist.cdf(chi_square),
        group_mismatches: mismatches,
        expected_group: expected(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_circuits_pass_every_check() {
        for scheme in Scheme::ALL {
            let mut cfg = VerifyConfig::new(3, 2, scheme);
            cfg.samples = 20;
            cfg.error_samples = 50;
            for check in verify(&cfg).unwrap() {
                assert!(check.passed, "{scheme}: {check}");
            }
        }
    }

    #[test]
    fn region_rule_matches_oracle_at_d5() {
        let spec = CircuitSpec::for_scheme(5, Scheme::InjectY, 1).unwrap();
        let ids: Vec<String> = region_rule_checks(&spec)
            .iter()
            .map(|c| c.as_str().to_owned())
            .collect();
        assert_eq!(ids, INJECTION_D5_POSTSELECT);
    }

    #[test]
    fn four_qubit_measurement_is_uniform() {
        let report = four_qubit_check(3);
        assert!(report.checks().iter().all(|c| c.passed));
        assert_eq!(report.shots, 1000);
    }

    #[test]
    fn check_lines_are_prefixed() {
        let c = CheckResult::new("x", false, "why");
        assert_eq!(c.to_string(), "FAIL x: why");
    }
}
