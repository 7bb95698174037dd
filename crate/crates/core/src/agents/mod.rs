//! Scheduling policies: a PPO learner with Bernoulli inclusion heads, and
//! training-free greedy and random proposers.

mod baseline;
pub mod checkpoint;
mod gradcheck;
mod observation;
mod policy;
mod ppo;

use serde::{Deserialize, Serialize};

pub use baseline::{baseline_reactive_wrap, baseline_unconstrained, random_proposal};
pub use gradcheck::{gradcheck, GradcheckReport};
pub use observation::Observation;
pub use policy::{
    bernoulli_entropy, log_one_minus_sigmoid, log_sigmoid, pattern_log_prob, propose,
    schedule_log_prob, sigmoid, Forward, PolicyParams, Shape, DEFAULT_HIDDEN,
};
pub use ppo::{
    build_batch, gae_advantages, loss_and_grad, ppo_update, Adam, Advantages, LossParts,
    PPOConfig, Sample, Transition, UpdateStats,
};

use crate::env::Schedule;
use crate::rng::Rng;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Ppo,
    Greedy,
    Random,
}

impl std::str::FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "ppo" => Ok(AgentKind::Ppo),
            "greedy" => Ok(AgentKind::Greedy),
            "random" => Ok(AgentKind::Random),
            other => Err(Error::InvalidConfig(format!("unknown agent kind `{other}`"))),
        }
    }
}

/// A proposal plus, for learned policies, what PPO needs to train on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    pub schedule: Schedule,
    pub log_prob: Option<f64>,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Agent {
    Greedy,
    Random,
    Ppo(PolicyParams),
}

impl Agent {
    pub fn kind(&self) -> AgentKind {
        match self {
            Agent::Greedy => AgentKind::Greedy,
            Agent::Random => AgentKind::Random,
            Agent::Ppo(_) => AgentKind::Ppo,
        }
    }

    pub fn propose(&self, obs: &Observation, queues: &[u32], n_channels: usize, rng: &mut Rng) -> Proposal {
        match self {
            Agent::Greedy => Proposal {
                schedule: baseline_unconstrained(queues, n_channels),
                log_prob: None,
                value: None,
            },
            Agent::Random => Proposal {
                schedule: random_proposal(queues, n_channels, rng),
                log_prob: None,
                value: None,
            },
            Agent::Ppo(params) => {
                let fwd = params.forward(obs);
                let (schedule, log_prob) = policy::propose_from_logits(&fwd.logits, obs, n_channels, rng);
                Proposal { schedule, log_prob: Some(log_prob), value: Some(fwd.value) }
            }
        }
    }
}
