//! Discrete-time uplink environment.
//!
//! Devices receive Bernoulli packet arrivals into bounded queues. Each slot
//! the controller picks a schedule of at most `n_channels` devices; every
//! scheduled device with backlog sends one packet. Channel gains and the
//! conflict graph are drawn once per episode.

mod channel;
mod graph;
mod schedule;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use channel::{compute_sinr, ChannelState};
pub use graph::{build_conflict_graph, is_safe_set, measure_density, ConflictGraph};
pub use schedule::Schedule;

use crate::rng::{self, Rng, Stream};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyMode {
    /// Each device pair conflicts independently with `target_density`.
    RandomGraph,
    /// Conflicts follow from pairwise SINR on drawn gains.
    Physical,
}

impl std::str::FromStr for TopologyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-graph" | "random" => Ok(TopologyMode::RandomGraph),
            "physical" => Ok(TopologyMode::Physical),
            other => Err(Error::InvalidConfig(format!("unknown topology mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub n_devices: usize,
    /// Cap on concurrent transmissions per slot.
    pub n_channels: usize,
    /// Per-device Bernoulli arrival probability per slot.
    pub arrival_prob: f64,
    pub slots_per_episode: usize,
    pub queue_cap: u32,
    /// Linear SINR threshold.
    pub sinr_threshold: f64,
    pub noise_power: f64,
    pub topology_mode: TopologyMode,
    pub target_density: f64,
    pub pathloss_exponent: f64,
    /// When set, devices that transmit alongside a conflicting neighbor
    /// do not deliver their packet.
    pub drop_on_violation: bool,
    pub seed: u64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            n_devices: 30,
            n_channels: 4,
            arrival_prob: 1.0,
            slots_per_episode: 1000,
            queue_cap: 50,
            sinr_threshold: 0.5,
            noise_power: 1e-3,
            topology_mode: TopologyMode::RandomGraph,
            target_density: 0.34,
            pathloss_exponent: 3.0,
            drop_on_violation: false,
            seed: 0,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_devices < 2 {
            return bad(format!("n_devices must be at least 2, got {}", self.n_devices));
        }
        if self.n_channels == 0 || self.n_channels > self.n_devices {
            return bad(format!(
                "n_channels must be in [1, {}], got {}",
                self.n_devices, self.n_channels
            ));
        }
        if !(0.0..=1.0).contains(&self.arrival_prob) {
            return bad(format!("arrival_prob must be in [0,1], got {}", self.arrival_prob));
        }
        if !(0.0..=1.0).contains(&self.target_density) {
            return bad(format!("target_density must be in [0,1], got {}", self.target_density));
        }
        if !(self.sinr_threshold > 0.0) {
            return bad(format!("sinr_threshold must be positive, got {}", self.sinr_threshold));
        }
        if !(self.noise_power > 0.0) {
            return bad(format!("noise_power must be positive, got {}", self.noise_power));
        }
        if self.slots_per_episode == 0 {
            return bad("slots_per_episode must be positive".into());
        }
        if self.queue_cap == 0 {
            return bad("queue_cap must be positive".into());
        }
        if !self.pathloss_exponent.is_finite() || self.pathloss_exponent < 0.0 {
            return bad(format!("pathloss_exponent must be >= 0, got {}", self.pathloss_exponent));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    /// Packets dequeued this slot.
    pub served: u32,
    /// The executed schedule.
    pub served_devices: Schedule,
    /// The executed schedule contained a conflicting pair.
    pub violation: bool,
    /// Packets admitted after serving.
    pub arrivals: u32,
}

/// One episode of the environment. Self-contained; owns its random stream.
#[derive(Debug, Clone)]
pub struct EnvState {
    config: EnvConfig,
    pub queues: Vec<u32>,
    pub slot_index: usize,
    pub channel: ChannelState,
    pub graph: ConflictGraph,
    arrivals_rng: Rng,
}

/// Starts an episode: empty queues and a fresh channel and conflict graph,
/// all drawn from streams of `episode_seed`.
pub fn reset(config: &EnvConfig, episode_seed: u64) -> Result<EnvState> {
    config.validate()?;
    let channel = ChannelState::draw(config, &mut rng::stream(episode_seed, Stream::Fading));
    let graph = build_conflict_graph(
        config,
        &channel,
        &mut rng::stream(episode_seed, Stream::Topology),
    )?;
    Ok(EnvState {
        config: config.clone(),
        queues: vec![0; config.n_devices],
        slot_index: 0,
        channel,
        graph,
        arrivals_rng: rng::stream(episode_seed, Stream::Arrivals),
    })
}

impl EnvState {
    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn is_done(&self) -> bool {
        self.slot_index >= self.config.slots_per_episode
    }

    pub fn backlogged(&self) -> impl Iterator<Item = usize> + '_ {
        self.queues.iter().enumerate().filter(|(_, &q)| q > 0).map(|(i, _)| i)
    }

    /// Advances one slot: serve the executed schedule, then admit arrivals.
    pub fn step(&mut self, executed: &Schedule) -> Result<StepOutcome> {
        if self.is_done() {
            return Err(Error::EpisodeFinished { slots: self.config.slots_per_episode });
        }
        if executed.len() > self.config.n_channels {
            return Err(Error::ScheduleTooLarge {
                size: executed.len(),
                n_channels: self.config.n_channels,
            });
        }
        executed.check_range(self.config.n_devices)?;

        let violation = !is_safe_set(executed, &self.graph);
        let mut served = 0;
        for d in executed.iter() {
            if self.queues[d] == 0 {
                continue;
            }
            if self.config.drop_on_violation
                && executed.iter().any(|o| self.graph.has_edge(d, o))
            {
                continue;
            }
            self.queues[d] -= 1;
            served += 1;
        }

        let lambda = self.config.arrival_prob;
        let cap = self.config.queue_cap;
        let mut arrivals = 0;
        for q in self.queues.iter_mut() {
            // One draw per device regardless of outcome keeps the stream aligned.
            let fired = self.arrivals_rng.gen::<f64>() < lambda;
            if fired && *q < cap {
                *q += 1;
                arrivals += 1;
            }
        }
        self.slot_index += 1;

        Ok(StepOutcome {
            served,
            served_devices: executed.clone(),
            violation,
            arrivals,
        })
    }
}

/// Free-function form of [`EnvState::step`].
pub fn env_step(state: &mut EnvState, executed: &Schedule) -> Result<StepOutcome> {
    state.step(executed)
}
