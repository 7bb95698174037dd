//! Two-layer perceptron policy with independent Bernoulli inclusion heads.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::Observation;
use crate::env::Schedule;
use crate::rng::{self, Rng, Stream};

pub const DEFAULT_HIDDEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub inputs: usize,
    pub hidden: usize,
    pub outputs: usize,
}

impl Shape {
    pub fn for_devices(n_devices: usize, hidden: usize) -> Self {
        Shape { inputs: 2 * n_devices + 1, hidden, outputs: n_devices }
    }

    pub fn n_params(&self) -> usize {
        let Shape { inputs, hidden, outputs } = *self;
        hidden * inputs + hidden + outputs * hidden + outputs + hidden + 1
    }

    // Offsets into the flat parameter vector.
    fn b1(&self) -> usize {
        self.hidden * self.inputs
    }
    fn w_pi(&self) -> usize {
        self.b1() + self.hidden
    }
    fn b_pi(&self) -> usize {
        self.w_pi() + self.outputs * self.hidden
    }
    fn w_v(&self) -> usize {
        self.b_pi() + self.outputs
    }
    fn b_v(&self) -> usize {
        self.w_v() + self.hidden
    }
}

/// Weights of `input -> hidden (tanh) -> {per-device logits, value}`, stored
/// flat in the order `w1, b1, w_pi, b_pi, w_v, b_v` (weights row-major,
/// one row per output unit).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub shape: Shape,
    pub data: Vec<f64>,
    pub seed: u64,
    pub updates: u64,
}

/// Activations from one forward pass, kept for backprop.
#[derive(Debug, Clone)]
pub struct Forward {
    pub input: Vec<f64>,
    pub hidden: Vec<f64>,
    pub logits: Vec<f64>,
    pub value: f64,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln sigma(z)`
pub fn log_sigmoid(z: f64) -> f64 {
    -softplus(-z)
}

/// `ln (1 - sigma(z))`
pub fn log_one_minus_sigmoid(z: f64) -> f64 {
    -softplus(z)
}

/// Entropy of a Bernoulli with logit `z`, in nats.
pub fn bernoulli_entropy(z: f64) -> f64 {
    let p = sigmoid(z);
    -(p * log_sigmoid(z) + (1.0 - p) * log_one_minus_sigmoid(z))
}

impl PolicyParams {
    /// Seeded initialization. Hidden and value weights are uniform in
    /// `+-1/sqrt(fan_in)`; the logit head starts near zero with its bias at
    /// `logit(n_channels / n_devices)`, so an untrained policy proposes about
    /// `n_channels` devices per slot.
    pub fn init(n_devices: usize, n_channels: usize, hidden: usize, seed: u64) -> Self {
        let shape = Shape::for_devices(n_devices, hidden);
        let mut rng = rng::stream(seed, Stream::Policy);
        let mut data = vec![0.0; shape.n_params()];
        let mut fill = |range: std::ops::Range<usize>, scale: f64, rng: &mut Rng| {
            for w in &mut data[range] {
                *w = scale * (2.0 * rng.gen::<f64>() - 1.0);
            }
        };
        let s_in = 1.0 / (shape.inputs as f64).sqrt();
        let s_h = 1.0 / (shape.hidden as f64).sqrt();
        fill(0..shape.b1(), s_in, &mut rng);
        fill(shape.b1()..shape.w_pi(), s_in, &mut rng);
        fill(shape.w_pi()..shape.b_pi(), 0.01 * s_h, &mut rng);
        fill(shape.w_v()..shape.b_v(), s_h, &mut rng);
        let p0 = (n_channels as f64 / n_devices as f64).clamp(1e-3, 1.0 - 1e-3);
        let bias = (p0 / (1.0 - p0)).ln();
        data[shape.b_pi()..shape.w_v()].fill(bias);
        PolicyParams { shape, data, seed, updates: 0 }
    }

    pub fn forward(&self, obs: &Observation) -> Forward {
        self.forward_input(obs.to_vec())
    }

    pub fn forward_input(&self, input: Vec<f64>) -> Forward {
        let s = self.shape;
        assert_eq!(input.len(), s.inputs, "observation dimension mismatch");
        let d = &self.data;
        let hidden: Vec<f64> = (0..s.hidden)
            .map(|k| {
                let row = &d[k * s.inputs..(k + 1) * s.inputs];
                let pre: f64 = row.iter().zip(&input).map(|(w, x)| w * x).sum::<f64>() + d[s.b1() + k];
                pre.tanh()
            })
            .collect();
        let logits = (0..s.outputs)
            .map(|i| {
                let row = &d[s.w_pi() + i * s.hidden..s.w_pi() + (i + 1) * s.hidden];
                row.iter().zip(&hidden).map(|(w, h)| w * h).sum::<f64>() + d[s.b_pi() + i]
            })
            .collect();
        let value = d[s.w_v()..s.b_v()].iter().zip(&hidden).map(|(w, h)| w * h).sum::<f64>()
            + d[s.b_v()];
        Forward { input, hidden, logits, value }
    }

    /// Accumulates parameter gradients given loss gradients w.r.t. the
    /// logits and the value output of `fwd`.
    pub fn backward(&self, fwd: &Forward, d_logits: &[f64], d_value: f64, grad: &mut [f64]) {
        let s = self.shape;
        let d = &self.data;
        let mut d_hidden = vec![0.0; s.hidden];
        for (i, &dz) in d_logits.iter().enumerate() {
            if dz == 0.0 {
                continue;
            }
            let base = s.w_pi() + i * s.hidden;
            for k in 0..s.hidden {
                grad[base + k] += dz * fwd.hidden[k];
                d_hidden[k] += dz * d[base + k];
            }
            grad[s.b_pi() + i] += dz;
        }
        for k in 0..s.hidden {
            grad[s.w_v() + k] += d_value * fwd.hidden[k];
            d_hidden[k] += d_value * d[s.w_v() + k];
        }
        grad[s.b_v()] += d_value;
        for k in 0..s.hidden {
            let d_pre = d_hidden[k] * (1.0 - fwd.hidden[k] * fwd.hidden[k]);
            if d_pre == 0.0 {
                continue;
            }
            let base = k * s.inputs;
            for (j, &x) in fwd.input.iter().enumerate() {
                grad[base + j] += d_pre * x;
            }
            grad[s.b1() + k] += d_pre;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// FNV-1a over the parameter bits; used to prove evaluation left the
    /// weights untouched.
    pub fn fingerprint(&self) -> u64 {
        self.data.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, v| {
            v.to_bits()
                .to_le_bytes()
                .iter()
                .fold(h, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
        })
    }
}

/// Log-likelihood of the inclusion pattern `executed` over backlogged
/// devices, given per-device logits.
pub fn pattern_log_prob(logits: &[f64], obs: &Observation, executed: &Schedule) -> f64 {
    (0..obs.n_devices())
        .filter(|&i| obs.is_backlogged(i))
        .map(|i| {
            if executed.contains(i) {
                log_sigmoid(logits[i])
            } else {
                log_one_minus_sigmoid(logits[i])
            }
        })
        .sum()
}

/// Samples a schedule. Each backlogged device joins independently with
/// probability `sigmoid(logit)`; if more than `n_channels` join, the ones
/// with the highest logits are kept. The returned log-probability is that
/// of the pre-cap inclusion pattern.
pub fn propose(params: &PolicyParams, obs: &Observation, n_channels: usize, rng: &mut Rng) -> (Schedule, f64) {
    let fwd = params.forward(obs);
    propose_from_logits(&fwd.logits, obs, n_channels, rng)
}

pub(crate) fn propose_from_logits(
    logits: &[f64],
    obs: &Observation,
    n_channels: usize,
    rng: &mut Rng,
) -> (Schedule, f64) {
    let mut chosen = Vec::new();
    let mut log_prob = 0.0;
    for (i, &z) in logits.iter().enumerate() {
        let u = rng.gen::<f64>();
        if !obs.is_backlogged(i) {
            continue;
        }
        if u < sigmoid(z) {
            chosen.push(i);
            log_prob += log_sigmoid(z);
        } else {
            log_prob += log_one_minus_sigmoid(z);
        }
    }
    if chosen.len() > n_channels {
        chosen.sort_by(|&a, &b| logits[b].total_cmp(&logits[a]).then(a.cmp(&b)));
        chosen.truncate(n_channels);
    }
    (Schedule::new(chosen), log_prob)
}

/// Log-likelihood of `executed` under `params`; the quantity the PPO ratio
/// is built from.
pub fn schedule_log_prob(params: &PolicyParams, obs: &Observation, executed: &Schedule) -> f64 {
    let fwd = params.forward(obs);
    pattern_log_prob(&fwd.logits, obs, executed)
}
