// The full offered-load sweep (3 systems x 4 loads x 3 seeds x 5 episodes)
// with the greedy proposer; writes `cells.csv` and `aggregate.csv`.
//
//     cargo run --release --example load_sweep [out_dir]

use pccsched::agents::AgentKind;
use pccsched::harness::{run_experiment, ExperimentConfig, ExperimentOutput};

pub fn run_example() -> pccsched::Result<ExperimentOutput> {
    let cfg = ExperimentConfig { agent_kind: AgentKind::Greedy, ..ExperimentConfig::default() };
    let out = run_experiment(&cfg)?;
    println!("{:<13} {:>6} {:>10} {:>10} {:>10} {:>8}", "system", "lambda", "throughput", "prevented", "eb_blocks", "aix");
    for s in &out.aggregate {
        println!(
            "{:<13} {:>6} {:>10.1} {:>10.1} {:>10.1} {:>8.4}",
            s.system.name(), s.lambda, s.mean("throughput"), s.mean("prevented_unsafe"), s.mean("eb_blocks"), s.mean("aix")
        );
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> pccsched::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "results".into());
    let out = run_example()?;
    let (cells, agg) = out.emit(std::path::Path::new(&dir))?;
    println!("wrote {} and {}", cells.display(), agg.display());
    Ok(())
}
