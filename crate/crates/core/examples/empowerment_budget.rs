// Walk the empowerment budget through a scripted sequence of certified
// schedules under the tight configuration and show when the gate engages.
//
//     cargo run --example empowerment_budget

use pccsched::env::{ConflictGraph, Schedule};
use pccsched::safety::{gate, verify_schedule, BudgetConfig, BudgetState};

pub fn run_example() -> pccsched::Result<Vec<f64>> {
    let cfg = BudgetConfig::default();
    let graph = ConflictGraph::from_edges(6, &[(0, 1), (2, 3)])?;
    let queues = [5, 3, 4, 2, 1, 6];
    let script = [
        Schedule::singleton(5),        // single user: neutral
        Schedule::new([0, 2, 4]),      // safe multi-user: neutral, executes
        Schedule::new([0, 1, 2, 5]),   // conflicting: corrected, risky
        Schedule::new([0, 2, 5]),      // safe multi-user but budget is low: gated
        Schedule::new([0, 2, 5]),
    ];

    let mut budget = BudgetState::full(&cfg);
    let mut betas = vec![budget.beta];
    println!("beta_max={} beta_min={} c_r={} c_n={} recover={}", cfg.beta_max, cfg.beta_min, cfg.cost_risky, cfg.cost_neutral, cfg.recover);
    for proposal in script {
        let cert = verify_schedule(&proposal, &graph, &queues);
        let d = gate(&cert, budget, &cfg, &queues, &graph);
        println!(
            "beta {:>4} | proposal {:<12} -> {:<10} {:?} blocked={} executed {} | cost {} recover {} -> beta {}",
            budget.beta, proposal.to_string(), format!("{:?}", cert.verdict), d.action_class, d.eb_blocked,
            d.executed, d.cost_charged, d.recover_applied, d.beta_after
        );
        budget.beta = d.beta_after;
        betas.push(budget.beta);
    }
    Ok(betas)
}

#[allow(dead_code)]
fn main() -> pccsched::Result<()> {
    run_example().map(|_| ())
}
