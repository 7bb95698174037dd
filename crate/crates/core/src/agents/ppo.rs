//! PPO on executed schedules: GAE, the clipped surrogate with value and
//! entropy terms, and Adam updates over shuffled minibatches.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::policy::{bernoulli_entropy, log_sigmoid, log_one_minus_sigmoid, sigmoid};
use super::{Observation, PolicyParams};
use crate::env::Schedule;
use crate::rng::Rng;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PPOConfig {
    pub clip_epsilon: f64,
    pub discount: f64,
    pub gae_lambda: f64,
    pub learning_rate: f64,
    pub epochs_per_update: usize,
    pub minibatch_size: usize,
    pub rollout_length: usize,
    pub value_coeff: f64,
    pub entropy_coeff: f64,
    /// Global gradient-norm clip; `0` disables it.
    pub max_grad_norm: f64,
    pub hidden: usize,
}

impl Default for PPOConfig {
    fn default() -> Self {
        PPOConfig {
            clip_epsilon: 0.2,
            discount: 0.99,
            gae_lambda: 0.95,
            learning_rate: 3e-4,
            epochs_per_update: 4,
            minibatch_size: 64,
            rollout_length: 512,
            value_coeff: 0.5,
            entropy_coeff: 0.01,
            max_grad_norm: 0.5,
            hidden: super::policy::DEFAULT_HIDDEN,
        }
    }
}

impl PPOConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.clip_epsilon > 0.0) {
            return bad("clip_epsilon must be positive");
        }
        if !(0.0..=1.0).contains(&self.discount) || !(0.0..=1.0).contains(&self.gae_lambda) {
            return bad("discount and gae_lambda must be in [0,1]");
        }
        if !(self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if self.epochs_per_update == 0 || self.minibatch_size == 0 || self.rollout_length == 0 {
            return bad("epochs, minibatch size and rollout length must be positive");
        }
        if self.hidden == 0 {
            return bad("hidden width must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub observation: Observation,
    pub executed: Schedule,
    /// Log-likelihood of `executed` under the policy that collected it.
    pub log_prob: f64,
    pub reward: f64,
    pub value: f64,
    pub done: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Advantages {
    pub raw: Vec<f64>,
    /// `raw` shifted and scaled to zero mean and unit variance.
    pub normalized: Vec<f64>,
    /// Value targets, `raw + value`.
    pub returns: Vec<f64>,
}

/// Generalized advantage estimation over one contiguous rollout.
/// `bootstrap_value` is the critic's estimate for the state after the last
/// transition (ignored when that transition is terminal).
pub fn gae_advantages(transitions: &[Transition], bootstrap_value: f64, config: &PPOConfig) -> Result<Advantages> {
    if transitions.is_empty() {
        return Err(Error::Empty("rollout"));
    }
    let n = transitions.len();
    let mut raw = vec![0.0; n];
    let mut next_value = bootstrap_value;
    let mut next_adv = 0.0;
    for t in (0..n).rev() {
        let tr = &transitions[t];
        let live = if tr.done { 0.0 } else { 1.0 };
        let delta = tr.reward + config.discount * next_value * live - tr.value;
        next_adv = delta + config.discount * config.gae_lambda * live * next_adv;
        raw[t] = next_adv;
        next_value = tr.value;
    }
    let returns = raw.iter().zip(transitions).map(|(a, t)| a + t.value).collect();
    let normalized = normalize(&raw);
    Ok(Advantages { raw, normalized, returns })
}

fn normalize(xs: &[f64]) -> Vec<f64> {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    if std < 1e-8 {
        xs.iter().map(|x| x - mean).collect()
    } else {
        xs.iter().map(|x| (x - mean) / std).collect()
    }
}

/// One training sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub observation: Observation,
    pub executed: Schedule,
    pub old_log_prob: f64,
    pub advantage: f64,
    pub ret: f64,
}

pub fn build_batch(transitions: &[Transition], adv: &Advantages) -> Vec<Sample> {
    transitions
        .iter()
        .zip(adv.normalized.iter().zip(&adv.returns))
        .map(|(t, (&a, &r))| Sample {
            observation: t.observation.clone(),
            executed: t.executed.clone(),
            old_log_prob: t.log_prob,
            advantage: a,
            ret: r,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LossParts {
    /// `-mean(min(rho A, clip(rho) A))`
    pub policy: f64,
    /// `mean((v - R)^2)`, before the coefficient.
    pub value: f64,
    /// Mean summed Bernoulli entropy over backlogged devices.
    pub entropy: f64,
    pub total: f64,
    /// Fraction of samples on the clip plateau.
    pub clip_fraction: f64,
}

/// Mean loss over `batch` and, if `grad` is given, its gradient (overwritten).
pub fn loss_and_grad(
    params: &PolicyParams,
    batch: &[Sample],
    config: &PPOConfig,
    mut grad: Option<&mut [f64]>,
) -> LossParts {
    let scale = 1.0 / batch.len() as f64;
    if let Some(g) = grad.as_deref_mut() {
        g.fill(0.0);
    }
    let (lo, hi) = (1.0 - config.clip_epsilon, 1.0 + config.clip_epsilon);
    let mut parts = LossParts::default();
    let mut clipped = 0usize;
    for s in batch {
        let fwd = params.forward(&s.observation);
        let obs = &s.observation;
        let mut new_lp = 0.0;
        let mut entropy = 0.0;
        for i in 0..obs.n_devices() {
            if obs.is_backlogged(i) {
                let z = fwd.logits[i];
                new_lp += if s.executed.contains(i) { log_sigmoid(z) } else { log_one_minus_sigmoid(z) };
                entropy += bernoulli_entropy(z);
            }
        }
        let ratio = (new_lp - s.old_log_prob).exp();
        let a = s.advantage;
        let unclipped = ratio * a;
        let clipped_obj = ratio.clamp(lo, hi) * a;
        let surrogate_active = unclipped <= clipped_obj;
        if !surrogate_active {
            clipped += 1;
        }
        let value_err = fwd.value - s.ret;
        parts.policy -= scale * unclipped.min(clipped_obj);
        parts.value += scale * value_err * value_err;
        parts.entropy += scale * entropy;

        if let Some(g) = grad.as_deref_mut() {
            // d(-surrogate)/d(new_lp)
            let d_lp = if surrogate_active { -scale * unclipped } else { 0.0 };
            let d_logits: Vec<f64> = (0..obs.n_devices())
                .map(|i| {
                    if !obs.is_backlogged(i) {
                        return 0.0;
                    }
                    let z = fwd.logits[i];
                    let p = sigmoid(z);
                    let taken = if s.executed.contains(i) { 1.0 } else { 0.0 };
                    // dH/dz = -z p (1 - p)
                    d_lp * (taken - p) + config.entropy_coeff * scale * z * p * (1.0 - p)
                })
                .collect();
            let d_value = 2.0 * config.value_coeff * scale * value_err;
            params.backward(&fwd, &d_logits, d_value, g);
        }
    }
    parts.total = parts.policy + config.value_coeff * parts.value - config.entropy_coeff * parts.entropy;
    parts.clip_fraction = clipped as f64 / batch.len() as f64;
    parts
}

#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Adam {
    pub fn new(n_params: usize) -> Self {
        Adam { m: vec![0.0; n_params], v: vec![0.0; n_params], t: 0, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for ((p, &g), (m, v)) in params.iter_mut().zip(grad).zip(self.m.iter_mut().zip(self.v.iter_mut())) {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + self.eps);
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UpdateStats {
    pub first: LossParts,
    pub last: LossParts,
    pub minibatches: usize,
}

/// Runs `epochs_per_update` passes of shuffled minibatch Adam steps on the
/// PPO loss. A non-finite loss or gradient aborts with the parameters left
/// as they were before the offending step.
pub fn ppo_update(
    params: &mut PolicyParams,
    optimizer: &mut Adam,
    batch: &[Sample],
    config: &PPOConfig,
    rng: &mut Rng,
) -> Result<UpdateStats> {
    if batch.is_empty() {
        return Err(Error::Empty("training batch"));
    }
    let mut grad = vec![0.0; params.data.len()];
    let mut order: Vec<usize> = (0..batch.len()).collect();
    let mut stats = UpdateStats::default();
    for _ in 0..config.epochs_per_update {
        order.shuffle(rng);
        for chunk in order.chunks(config.minibatch_size) {
            let mb: Vec<Sample> = chunk.iter().map(|&k| batch[k].clone()).collect();
            let parts = loss_and_grad(params, &mb, config, Some(&mut grad));
            if !parts.total.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFiniteLoss(format!(
                    "update {} minibatch {}: policy={} value={} entropy={}",
                    params.updates, stats.minibatches, parts.policy, parts.value, parts.entropy
                )));
            }
            if config.max_grad_norm > 0.0 {
                let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                if norm > config.max_grad_norm {
                    let k = config.max_grad_norm / norm;
                    grad.iter_mut().for_each(|g| *g *= k);
                }
            }
            optimizer.step(&mut params.data, &grad, config.learning_rate);
            if stats.minibatches == 0 {
                stats.first = parts;
            }
            stats.last = parts;
            stats.minibatches += 1;
        }
    }
    params.updates += 1;
    Ok(stats)
}
