//! Central finite-difference check of the PPO loss gradient.

use super::ppo::{loss_and_grad, PPOConfig, Sample};
use super::{schedule_log_prob, Observation, PolicyParams};
use crate::env::{ConflictGraph, Schedule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradcheckReport {
    pub n_params: usize,
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    /// Samples sitting on the clip plateau; the check covers both branches.
    pub clipped_samples: usize,
}

/// Relative error floor: gradients smaller than this are compared absolutely.
const REL_FLOOR: f64 = 1e-6;

/// Compares the analytic gradient of the full PPO loss (clipped surrogate,
/// value, entropy) against central differences with step `h`, on a
/// 3-device network with the given hidden width.
pub fn gradcheck(seed: u64, hidden: usize, h: f64) -> GradcheckReport {
    let params = PolicyParams::init(3, 2, hidden, seed);
    let cfg = PPOConfig { entropy_coeff: 0.05, ..PPOConfig::default() };
    let batch = toy_batch(&params);

    let mut analytic = vec![0.0; params.data.len()];
    let parts = loss_and_grad(&params, &batch, &cfg, Some(&mut analytic));

    let mut probe = params.clone();
    let mut max_rel: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    for k in 0..probe.data.len() {
        let orig = probe.data[k];
        probe.data[k] = orig + h;
        let up = loss_and_grad(&probe, &batch, &cfg, None).total;
        probe.data[k] = orig - h;
        let down = loss_and_grad(&probe, &batch, &cfg, None).total;
        probe.data[k] = orig;
        let numeric = (up - down) / (2.0 * h);
        let abs = (analytic[k] - numeric).abs();
        let rel = abs / analytic[k].abs().max(numeric.abs()).max(REL_FLOOR);
        max_abs = max_abs.max(abs);
        max_rel = max_rel.max(rel);
    }
    GradcheckReport {
        n_params: params.data.len(),
        max_rel_error: max_rel,
        max_abs_error: max_abs,
        clipped_samples: (parts.clip_fraction * batch.len() as f64).round() as usize,
    }
}

/// Samples whose importance ratios sit well inside or well outside the clip
/// band, so a small parameter step never crosses a kink.
fn toy_batch(params: &PolicyParams) -> Vec<Sample> {
    let g = ConflictGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    // (queues, executed, log-ratio offset, advantage)
    let rows: [(&[u32], &[usize], f64, f64); 6] = [
        (&[3, 1, 2], &[0, 2], 0.05, 1.3),   // inside band
        (&[0, 4, 1], &[1], -0.1, -0.7),     // inside band
        (&[2, 2, 2], &[], 0.4, 0.9),        // rho > 1+eps, A > 0: plateau
        (&[1, 5, 0], &[0], -0.5, -1.1),     // rho < 1-eps, A < 0: plateau
        (&[4, 0, 3], &[0, 2], 0.45, -0.6),  // rho > 1+eps, A < 0: unclipped
        (&[1, 1, 6], &[2], -0.45, 0.8),     // rho < 1-eps, A > 0: unclipped
    ];
    rows.iter()
        .enumerate()
        .map(|(k, &(q, ex, offset, advantage))| {
            let observation = Observation::new(q, 6, 0.25 + 0.1 * k as f64, &g, true);
            let executed = Schedule::new(ex.iter().copied());
            let lp = schedule_log_prob(params, &observation, &executed);
            Sample {
                observation,
                executed,
                old_log_prob: lp - offset,
                advantage,
                ret: 0.3 * k as f64 - 0.5,
            }
        })
        .collect()
}
