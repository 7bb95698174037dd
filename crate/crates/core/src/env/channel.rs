use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{EnvConfig, Schedule};
use crate::{rng::Rng, Error, Result};

/// Closest distance to the receiver, so pathloss stays finite.
const MIN_DISTANCE: f64 = 0.05;

/// Static per-episode channel: effective gains (pathloss times fading) and
/// receiver noise power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelState {
    pub gains: Vec<f64>,
    pub noise_power: f64,
}

impl ChannelState {
    /// Places devices uniformly in the unit disk around the receiver and
    /// applies `d^-alpha` pathloss with unit-mean exponential fading power.
    pub fn draw(config: &EnvConfig, rng: &mut Rng) -> Self {
        let gains = (0..config.n_devices)
            .map(|_| {
                let r = rng.gen::<f64>().sqrt().max(MIN_DISTANCE);
                let fade = -(1.0 - rng.gen::<f64>()).ln();
                (r.powf(-config.pathloss_exponent) * fade).max(f64::MIN_POSITIVE)
            })
            .collect();
        ChannelState {
            gains,
            noise_power: config.noise_power,
        }
    }
}

/// SINR of `device` when everything in `schedule` transmits at once:
/// its own gain over the summed gains of the other transmitters plus noise.
pub fn compute_sinr(device: usize, schedule: &Schedule, channel: &ChannelState) -> Result<f64> {
    if !schedule.contains(device) {
        return Err(Error::NotInSchedule { device });
    }
    schedule.check_range(channel.gains.len())?;
    let interference: f64 = schedule
        .iter()
        .filter(|&j| j != device)
        .map(|j| channel.gains[j])
        .sum();
    Ok(channel.gains[device] / (interference + channel.noise_power))
}
