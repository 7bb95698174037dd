use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::pipeline::{run_episode, train_agent, TrainingReport};
use super::{ExperimentConfig, System};
use crate::agents::{Agent, AgentKind, PolicyParams};
use crate::env::{measure_density, reset, EnvConfig};
use crate::metrics::{aggregate, emit_csv, AggregateStats, CellResult};
use crate::rng::{self, derive_seed, label, Stream};
use crate::{Error, Result};

/// Seed for everything a (system, lambda, seed) cell draws on its own:
/// policy initialization, training episodes, and proposal sampling.
pub fn cell_seed(master: u64, system: System, lambda: f64, seed: u64) -> u64 {
    derive_seed(&[master, label(system.name()), lambda.to_bits(), seed])
}

/// Evaluation episodes share topology and arrivals across systems and loads,
/// so systems are compared on the same conflict graphs.
pub fn episode_seed(master: u64, seed: u64, episode: usize) -> u64 {
    derive_seed(&[master, label("eval"), seed, episode as u64])
}

#[derive(Debug, Clone)]
pub struct CellReport {
    pub system: System,
    pub lambda: f64,
    pub seed: u64,
    pub episodes: Vec<CellResult>,
    pub training: Option<TrainingReport>,
    /// Parameter fingerprints around evaluation; equal when evaluation is frozen.
    pub fingerprint_before_eval: Option<u64>,
    pub fingerprint_after_eval: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct CellFailure {
    pub system: System,
    pub lambda: f64,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub cells: Vec<CellResult>,
    pub aggregate: Vec<AggregateStats>,
    pub reports: Vec<CellReport>,
    pub failures: Vec<CellFailure>,
}

impl ExperimentOutput {
    pub fn emit(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        emit_csv(&self.aggregate, &self.cells, dir)
    }

    pub fn stats(&self, system: System, lambda: f64) -> Option<&AggregateStats> {
        self.aggregate.iter().find(|s| s.system == system && s.lambda == lambda)
    }
}

/// Trains (for PPO) and evaluates one cell.
pub fn run_cell(config: &ExperimentConfig, system: System, lambda: f64, seed: u64) -> Result<CellReport> {
    let mut cfg = config.clone();
    cfg.env.arrival_prob = lambda;
    let cseed = cell_seed(config.master_seed, system, lambda, seed);

    let (agent, training) = match config.agent_kind {
        AgentKind::Greedy => (Agent::Greedy, None),
        AgentKind::Random => (Agent::Random, None),
        AgentKind::Ppo => {
            let init = PolicyParams::init(cfg.env.n_devices, cfg.env.n_channels, cfg.ppo.hidden, cseed);
            let (params, report) = train_agent(&cfg, system, init, cseed)?;
            (Agent::Ppo(params), Some(report))
        }
    };
    let fingerprint = |a: &Agent| match a {
        Agent::Ppo(p) => Some(p.fingerprint()),
        _ => None,
    };
    let before = fingerprint(&agent);

    let mut episodes = Vec::with_capacity(config.eval_episodes);
    for ep in 0..config.eval_episodes {
        let mut policy_rng = rng::stream(derive_seed(&[cseed, label("eval"), ep as u64]), Stream::Policy);
        let r = run_episode(&cfg, system, &agent, episode_seed(config.master_seed, seed, ep), &mut policy_rng, false)?;
        episodes.push(CellResult { system, lambda, seed, episode: ep, metrics: r.metrics });
    }
    let after = fingerprint(&agent);
    if before != after {
        return Err(Error::SafetyInvariant("policy parameters changed during evaluation".into()));
    }
    Ok(CellReport {
        system,
        lambda,
        seed,
        episodes,
        training,
        fingerprint_before_eval: before,
        fingerprint_after_eval: after,
    })
}

/// Runs every (system, lambda, seed) cell and aggregates the evaluation
/// episodes. Cells are independent; a failed cell is reported and the rest
/// are still aggregated.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let mut grid = Vec::new();
    for &system in &config.systems {
        for &lambda in &config.lambdas {
            for &seed in &config.seeds {
                grid.push((system, lambda, seed));
            }
        }
    }
    grid.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    grid.dedup();

    let work = |&(system, lambda, seed): &(System, f64, u64)| (system, lambda, seed, run_cell(config, system, lambda, seed));
    let results: Vec<_> = if config.parallel {
        grid.par_iter().map(work).collect()
    } else {
        grid.iter().map(work).collect()
    };

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (system, lambda, seed, r) in results {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => failures.push(CellFailure { system, lambda, seed, error: e.to_string() }),
        }
    }
    let cells: Vec<CellResult> = reports.iter().flat_map(|r| r.episodes.iter().cloned()).collect();
    let aggregate = aggregate(&cells);
    Ok(ExperimentOutput { cells, aggregate, reports, failures })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub samples: usize,
    pub target: f64,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

/// Measures conflict density over `samples` independently drawn topologies.
pub fn calibrate(env: &EnvConfig, samples: usize, master_seed: u64) -> Result<CalibrationReport> {
    if samples == 0 {
        return Err(Error::Empty("calibration samples"));
    }
    let densities = (0..samples)
        .map(|k| reset(env, derive_seed(&[master_seed, label("calibrate"), k as u64])).map(|s| measure_density(&s.graph)))
        .collect::<Result<Vec<_>>>()?;
    let n = samples as f64;
    let mean = densities.iter().sum::<f64>() / n;
    let std = if samples > 1 {
        (densities.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(CalibrationReport {
        samples,
        target: env.target_density,
        mean,
        std,
        min: densities.iter().copied().fold(f64::INFINITY, f64::min),
        max: densities.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}
