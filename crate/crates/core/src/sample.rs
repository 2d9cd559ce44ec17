//! Post-selected Monte Carlo over initialisation errors.

use std::collections::BTreeSet;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::oracle::sim::{
    deterministic_checks, lower_with_errors, repeat_in_all_rounds, shot_rng, RunOptions,
};
use crate::pauli::{Pauli, PauliOperator};
use crate::surface::{build_diagram, data_node, logical_operators, CircuitSpec, Scheme};
use crate::web::{solve, BoundaryCondition, PauliErrorSet, Solution};
use crate::zx::{CheckId, Diagram};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PostSelect {
    #[default]
    None,
    /// The deterministic first-round checks.
    FigureSet,
    /// Every check whose error-free outcome is forced to +1.
    AllDeterministic,
}

impl FromStr for PostSelect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(PostSelect::None),
            "figure-set" => Ok(PostSelect::FigureSet),
            "all-deterministic" => Ok(PostSelect::AllDeterministic),
            _ => Err(Error::Parse(format!("unknown post-selection mode {s:?}"))),
        }
    }
}

/// The post-selected checks of a diagram. With `all_rounds`, figure-set
/// plaquettes are post-selected in every round.
pub fn postselect_set(d: &Diagram, mode: PostSelect, all_rounds: bool) -> Result<Vec<CheckId>> {
    match mode {
        PostSelect::None => Ok(Vec::new()),
        PostSelect::FigureSet => {
            let first = deterministic_checks(d, false)?;
            if all_rounds {
                let rounds = d
                    .meta("rounds")
                    .and_then(|r| r.parse().ok())
                    .ok_or_else(|| Error::UnrecognizedStructure("missing rounds".into()))?;
                repeat_in_all_rounds(&first, rounds)
            } else {
                Ok(first)
            }
        }
        PostSelect::AllDeterministic => deterministic_checks(d, true),
    }
}

/// An error on data qubit `q` between preparation and the first round,
/// written `X14`, `Z3` or `Y4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InitError {
    pub qubit: usize,
    pub pauli: Pauli,
}

impl FromStr for InitError {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected an init error like X14, got {s:?}"));
        if s.len() < 2 || !s.is_char_boundary(1) {
            return Err(bad());
        }
        let (p, q) = s.split_at(1);
        Ok(InitError {
            pauli: p.parse().map_err(|_| bad())?,
            qubit: q.parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SampleConfig {
    pub distance: usize,
    pub rounds: usize,
    pub scheme: Scheme,
    pub seed: u64,
    pub shots: u64,
    /// Independent X error probability per data qubit at initialisation.
    pub error_rate: f64,
    /// Also draw independent Z errors at the same rate.
    pub z_errors: bool,
    /// Errors applied on every shot.
    pub fixed: Vec<InitError>,
    pub postselect: PostSelect,
    pub all_rounds: bool,
}

impl SampleConfig {
    pub fn new(distance: usize, rounds: usize, scheme: Scheme) -> Self {
        SampleConfig {
            distance,
            rounds,
            scheme,
            seed: 0,
            shots: 1000,
            error_rate: 0.0,
            z_errors: false,
            fixed: Vec::new(),
            postselect: PostSelect::FigureSet,
            all_rounds: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SampleRow {
    pub shot: u64,
    pub accepted: bool,
    /// Frame-corrected logical outcome; `true` is a logical error.
    pub logical_y: bool,
    pub n_errors: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rate {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub low: f64,
    pub high: f64,
}

/// Wilson score interval at 95% confidence.
pub fn wilson(successes: u64, trials: u64) -> Rate {
    if trials == 0 {
        return Rate {
            successes,
            trials,
            rate: f64::NAN,
            low: 0.0,
            high: 1.0,
        };
    }
    let z = Normal::standard().inverse_cdf(0.975);
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    Rate {
        successes,
        trials,
        rate: p,
        low: (centre - half).max(0.0),
        high: (centre + half).min(1.0),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub distance: usize,
    pub rounds: usize,
    pub scheme: String,
    pub seed: u64,
    pub error_rate: f64,
    pub postselect: Vec<CheckId>,
    pub frame: Vec<CheckId>,
    pub acceptance: Rate,
    pub raw_logical_error: Rate,
    pub conditional_logical_error: Rate,
}

impl Summary {
    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }
}

#[derive(Clone, Debug)]
pub struct SampleResult {
    pub rows: Vec<SampleRow>,
    pub summary: Summary,
}

const X_ERROR_WORDS: u128 = 1 << 40;
const Z_ERROR_WORDS: u128 = 1 << 41;

pub fn sample(cfg: &SampleConfig) -> Result<SampleResult> {
    if !(0.0..=1.0).contains(&cfg.error_rate) {
        return Err(Error::Config(format!(
            "error rate must lie in [0, 1], got {}",
            cfg.error_rate
        )));
    }
    if cfg.shots == 0 {
        return Err(Error::Config("shots must be at least 1".into()));
    }
    let spec = CircuitSpec::for_scheme(cfg.distance, cfg.scheme, cfg.rounds)?;
    let d = build_diagram(&spec);
    let n = spec.layout().num_qubits();
    let mut fixed = PauliErrorSet::new();
    for e in &cfg.fixed {
        if e.qubit >= n {
            return Err(Error::ErrorInsertion(format!(
                "qubit {} out of range",
                e.qubit
            )));
        }
        fixed.push(&d, &data_node(e.qubit, 0), &data_node(e.qubit, 1), e.pauli)?;
    }
    let program = lower_with_errors(&d, &fixed)?;

    let logical = cfg
        .scheme
        .logical(&logical_operators(spec.layout()))
        .clone();
    let frame = match solve(&d, &BoundaryCondition::from_operator(&d, &logical)?)? {
        Solution::Web(w) => w.stub_set().to_vec(),
        Solution::Infeasible(w) => {
            return Err(Error::Config(format!(
                "no correlator web for {logical}: {w}"
            )))
        }
    };
    let postselect = postselect_set(&d, cfg.postselect, cfg.all_rounds)?;
    let opts = RunOptions {
        postselect: Some(postselect.iter().cloned().collect::<BTreeSet<_>>()),
        measure_logical: Some(logical),
        frame: Some(frame.clone()),
    };

    let rows = (0..cfg.shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(cfg.seed, shot);
            let mut errors = Vec::new();
            for q in 0..n {
                rng.set_word_pos(X_ERROR_WORDS + 4 * q as u128);
                if rng.random::<f64>() < cfg.error_rate {
                    errors.push(PauliOperator::from_terms(n, [(q, Pauli::X)]));
                }
                if cfg.z_errors {
                    rng.set_word_pos(Z_ERROR_WORDS + 4 * q as u128);
                    if rng.random::<f64>() < cfg.error_rate {
                        errors.push(PauliOperator::from_terms(n, [(q, Pauli::Z)]));
                    }
                }
            }
            let record = program
                .with_init_errors(&errors)
                .execute(cfg.seed, shot, &opts)?;
            Ok(SampleRow {
                shot,
                accepted: record.accepted.unwrap_or(true),
                logical_y: record.logical_y_corrected.expect("logical measured"),
                n_errors: errors.len() + cfg.fixed.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let accepted = rows.iter().filter(|r| r.accepted).count() as u64;
    let raw_errors = rows.iter().filter(|r| r.logical_y).count() as u64;
    let accepted_errors = rows.iter().filter(|r| r.accepted && r.logical_y).count() as u64;
    let summary = Summary {
        distance: cfg.distance,
        rounds: cfg.rounds,
        scheme: cfg.scheme.name().to_owned(),
        seed: cfg.seed,
        error_rate: cfg.error_rate,
        postselect,
        frame,
        acceptance: wilson(accepted, cfg.shots),
        raw_logical_error: wilson(raw_errors, cfg.shots),
        conditional_logical_error: wilson(accepted_errors, accepted),
    };
    Ok(SampleResult { rows, summary })
}

/// CSV with columns `shot,accepted,logical_y,n_errors`.
pub fn to_csv(rows: &[SampleRow]) -> String {
    let mut out = String::from("shot,accepted,logical_y,n_errors\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.shot, r.accepted as u8, r.logical_y as u8, r.n_errors
        ));
    }
    out
}
