use std::path::Path;

use serde::{Deserialize, Serialize};

use super::System;
use crate::agents::{AgentKind, PPOConfig};
use crate::env::EnvConfig;
use crate::safety::BudgetConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub env: EnvConfig,
    pub budget: BudgetConfig,
    pub ppo: PPOConfig,
    pub systems: Vec<System>,
    pub lambdas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub eval_episodes: usize,
    pub train_updates: usize,
    pub agent_kind: AgentKind,
    pub master_seed: u64,
    /// Feed per-device conflict degrees to the learned policy.
    pub observe_degrees: bool,
    /// Fan cells out over a thread pool. Output is identical either way.
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            env: EnvConfig::default(),
            budget: BudgetConfig::default(),
            ppo: PPOConfig::default(),
            systems: System::ALL.to_vec(),
            lambdas: vec![0.2, 0.4, 0.7, 1.0],
            seeds: vec![11, 23, 47],
            eval_episodes: 5,
            train_updates: 60,
            agent_kind: AgentKind::Ppo,
            master_seed: 2024,
            observe_degrees: true,
            parallel: true,
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| Error::InvalidConfig(format!("{key}: `{s}`: {e}"))))
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| Error::InvalidConfig(format!("{key}: `{value}`: {e}")))
}

impl ExperimentConfig {
    /// Every key accepted by [`ExperimentConfig::set`].
    pub const KEYS: &'static [&'static str] = &[
        "n_devices", "n_channels", "arrival_prob", "slots", "queue_cap", "sinr_threshold", "noise_power",
        "topology", "density", "pathloss_exponent", "drop_on_violation", "beta_max", "beta_min",
        "cost_risky", "cost_neutral", "recover", "clip_epsilon", "discount", "gae_lambda",
        "learning_rate", "epochs_per_update", "minibatch_size", "rollout_length", "value_coeff",
        "entropy_coeff", "max_grad_norm", "hidden", "systems", "lambdas", "seeds", "eval_episodes",
        "train_updates", "agent", "master_seed", "observe_degrees", "parallel",
    ];

    /// Sets one field by its config-file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "n_devices" => self.env.n_devices = parse_one(key, v)?,
            "n_channels" => self.env.n_channels = parse_one(key, v)?,
            "arrival_prob" => self.env.arrival_prob = parse_one(key, v)?,
            "slots" => self.env.slots_per_episode = parse_one(key, v)?,
            "queue_cap" => self.env.queue_cap = parse_one(key, v)?,
            "sinr_threshold" => self.env.sinr_threshold = parse_one(key, v)?,
            "noise_power" => self.env.noise_power = parse_one(key, v)?,
            "topology" => self.env.topology_mode = v.parse()?,
            "density" => self.env.target_density = parse_one(key, v)?,
            "pathloss_exponent" => self.env.pathloss_exponent = parse_one(key, v)?,
            "drop_on_violation" => self.env.drop_on_violation = parse_one(key, v)?,
            "beta_max" => self.budget.beta_max = parse_one(key, v)?,
            "beta_min" => self.budget.beta_min = parse_one(key, v)?,
            "cost_risky" => self.budget.cost_risky = parse_one(key, v)?,
            "cost_neutral" => self.budget.cost_neutral = parse_one(key, v)?,
            "recover" => self.budget.recover = parse_one(key, v)?,
            "clip_epsilon" => self.ppo.clip_epsilon = parse_one(key, v)?,
            "discount" => self.ppo.discount = parse_one(key, v)?,
            "gae_lambda" => self.ppo.gae_lambda = parse_one(key, v)?,
            "learning_rate" => self.ppo.learning_rate = parse_one(key, v)?,
            "epochs_per_update" => self.ppo.epochs_per_update = parse_one(key, v)?,
            "minibatch_size" => self.ppo.minibatch_size = parse_one(key, v)?,
            "rollout_length" => self.ppo.rollout_length = parse_one(key, v)?,
            "value_coeff" => self.ppo.value_coeff = parse_one(key, v)?,
            "entropy_coeff" => self.ppo.entropy_coeff = parse_one(key, v)?,
            "max_grad_norm" => self.ppo.max_grad_norm = parse_one(key, v)?,
            "hidden" => self.ppo.hidden = parse_one(key, v)?,
            "systems" => self.systems = parse_list(key, v)?,
            "lambdas" => self.lambdas = parse_list(key, v)?,
            "seeds" => self.seeds = parse_list(key, v)?,
            "eval_episodes" => self.eval_episodes = parse_one(key, v)?,
            "train_updates" => self.train_updates = parse_one(key, v)?,
            "agent" => self.agent_kind = v.parse()?,
            "master_seed" => self.master_seed = parse_one(key, v)?,
            "observe_degrees" => self.observe_degrees = parse_one(key, v)?,
            "parallel" => self.parallel = parse_one(key, v)?,
            other => return Err(Error::InvalidConfig(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        self.budget.validate()?;
        self.ppo.validate()?;
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.systems.is_empty() {
            return bad("systems must not be empty".into());
        }
        if self.lambdas.is_empty() {
            return bad("lambdas must not be empty".into());
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return bad(format!("lambda {l} outside [0,1]"));
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() != self.seeds.len() {
            return bad("seeds must be distinct".into());
        }
        if self.seeds.is_empty() {
            return bad("seeds must not be empty".into());
        }
        if self.eval_episodes == 0 {
            return bad("eval_episodes must be positive".into());
        }
        Ok(())
    }
}

/// Parses flat `key = value` lines over the defaults. `#` starts a comment.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigSyntax {
            line: idx + 1,
            reason: format!("expected `key = value`, got `{line}`"),
        })?;
        cfg.set(key.trim(), value).map_err(|e| Error::ConfigSyntax { line: idx + 1, reason: e.to_string() })?;
    }
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_config(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_tight_budget_setup() {
        let c = ExperimentConfig::default();
        assert_eq!((c.env.n_devices, c.env.n_channels, c.env.slots_per_episode), (30, 4, 1000));
        assert_eq!(c.env.target_density, 0.34);
        assert_eq!((c.budget.beta_max, c.budget.beta_min, c.budget.cost_risky), (8.0, 6.0, 4.0));
        assert_eq!(c.lambdas, vec![0.2, 0.4, 0.7, 1.0]);
        assert_eq!(c.seeds, vec![11, 23, 47]);
        assert_eq!(c.eval_episodes, 5);
        c.validate().unwrap();
    }

    #[test]
    fn parses_file_with_comments() {
        let c = parse_config(
            "# sweep\nsystems = proactive, reactive\nlambdas = 1.0\n\nagent = greedy # inline\nslots=200\n",
        )
        .unwrap();
        assert_eq!(c.systems, vec![System::Proactive, System::Reactive]);
        assert_eq!(c.lambdas, vec![1.0]);
        assert_eq!(c.agent_kind, AgentKind::Greedy);
        assert_eq!(c.env.slots_per_episode, 200);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        let e = parse_config("lambdas = 0.2\nbogus = 1\n").unwrap_err();
        assert!(matches!(e, Error::ConfigSyntax { line: 2, .. }), "{e}");
        assert!(parse_config("no equals sign").is_err());
        assert!(parse_config("lambdas = 0.2, x").is_err());
    }

    #[test]
    fn every_key_is_settable() {
        let sample = |k: &str| match k {
            "topology" => "physical",
            "systems" => "reactive",
            "agent" => "random",
            "drop_on_violation" | "observe_degrees" | "parallel" => "false",
            "lambdas" => "0.5",
            _ => "3",
        };
        let mut c = ExperimentConfig::default();
        for k in ExperimentConfig::KEYS {
            c.set(k, sample(k)).unwrap_or_else(|e| panic!("{k}: {e}"));
        }
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig { seeds: vec![1, 1], ..ExperimentConfig::default() };
        assert!(c.validate().is_err());
        c.seeds = vec![1];
        c.lambdas = vec![1.2];
        assert!(c.validate().is_err());
        c.lambdas = vec![];
        assert!(c.validate().is_err());
    }
}
