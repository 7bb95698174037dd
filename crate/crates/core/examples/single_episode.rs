// Run one 1000-slot episode per system with the greedy proposer and compare
// their metrics on the same topology and arrivals.
//
//     cargo run --example single_episode

use pccsched::agents::Agent;
use pccsched::harness::{episode_seed, run_episode, ExperimentConfig, System};
use pccsched::metrics::EpisodeMetrics;
use pccsched::rng::{stream, Stream};

pub fn run_example() -> pccsched::Result<Vec<(System, EpisodeMetrics)>> {
    let mut cfg = ExperimentConfig::default();
    cfg.env.arrival_prob = 0.7;
    let seed = episode_seed(cfg.master_seed, 11, 0);
    let mut out = Vec::new();
    for system in System::ALL {
        let r = run_episode(&cfg, system, &Agent::Greedy, seed, &mut stream(0, Stream::Policy), false)?;
        let m = r.metrics;
        println!(
            "{system:<13} throughput {:>5}  prevented {:>4}  eb_blocks {:>4}  aix {:.3}  violations {}",
            m.throughput, m.prevented_unsafe, m.eb_blocks, m.aix, m.violations
        );
        out.push((system, m));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> pccsched::Result<()> {
    run_example().map(|_| ())
}
