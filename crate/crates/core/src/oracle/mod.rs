//! Stabilizer-tableau ground truth for everything the webs predict.

pub mod sim;
pub mod tableau;

pub use sim::{
    deterministic_checks, lower, lower_with_errors, run, Instruction, OutcomeAnalysis, Program,
    RunOptions, ShotRecord,
};
pub use tableau::{prepare, Measurement, Tableau};
