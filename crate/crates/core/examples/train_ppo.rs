// Train the PPO scheduler inside the proactive pipeline (it learns from the
// executed, safety-corrected schedules) and evaluate it frozen.
//
//     cargo run --release --example train_ppo [updates]

use pccsched::agents::{Agent, PolicyParams};
use pccsched::harness::{episode_seed, run_episode, train_agent, ExperimentConfig, System};
use pccsched::rng::{stream, Stream};

pub fn run_example(updates: usize) -> pccsched::Result<(u64, u64)> {
    let mut cfg = ExperimentConfig { train_updates: updates, ..ExperimentConfig::default() };
    cfg.env.arrival_prob = 1.0;
    let system = System::Unconstrained;
    let init = PolicyParams::init(cfg.env.n_devices, cfg.env.n_channels, cfg.ppo.hidden, 5);

    let eval = |agent: &Agent| -> pccsched::Result<u64> {
        let r = run_episode(&cfg, system, agent, episode_seed(cfg.master_seed, 11, 0), &mut stream(1, Stream::Policy), false)?;
        Ok(r.metrics.throughput)
    };
    let before = eval(&Agent::Ppo(init.clone()))?;
    let (trained, report) = train_agent(&cfg, system, init, 5)?;
    for (k, r) in report.rollout_reward.iter().enumerate().step_by(10.max(updates / 6).max(1)) {
        println!("update {k:>3}: mean reward per slot {r:.3}");
    }
    let after = eval(&Agent::Ppo(trained))?;
    println!("throughput before training {before}, after {updates} updates {after}");
    Ok((before, after))
}

#[allow(dead_code)]
fn main() -> pccsched::Result<()> {
    let updates = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(60);
    run_example(updates).map(|_| ())
}
