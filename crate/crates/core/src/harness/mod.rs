//! Experiment orchestration: the per-slot pipeline for each system, PPO
//! training and frozen evaluation, sweeps over offered load and seeds, and
//! the command-line front end.

pub mod cli;
mod config;
mod experiment;
mod pipeline;

use serde::{Deserialize, Serialize};

pub use config::{parse_config, ExperimentConfig};
pub use experiment::{
    calibrate, cell_seed, episode_seed, run_cell, run_experiment, CalibrationReport, CellFailure,
    CellReport, ExperimentOutput,
};
pub use pipeline::{
    observe, run_episode, run_slot, train_agent, EpisodeResult, SlotTrace, TrainingReport,
};

use crate::Error;

/// Which safety layer sits between the agent and the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    /// Proposals execute as-is.
    Unconstrained,
    /// Unsafe proposals are projected to a greedy maximal independent set.
    Reactive,
    /// Certificate check, then the empowerment-budget gate.
    Proactive,
}

impl System {
    pub const ALL: [System; 3] = [System::Unconstrained, System::Reactive, System::Proactive];

    pub fn name(self) -> &'static str {
        match self {
            System::Unconstrained => "unconstrained",
            System::Reactive => "reactive",
            System::Proactive => "proactive",
        }
    }

    pub fn is_safety_aware(self) -> bool {
        self != System::Unconstrained
    }
}

impl std::fmt::Display for System {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "unconstrained" => Ok(System::Unconstrained),
            "reactive" => Ok(System::Reactive),
            "proactive" => Ok(System::Proactive),
            other => Err(Error::InvalidConfig(format!("unknown system `{other}`"))),
        }
    }
}
