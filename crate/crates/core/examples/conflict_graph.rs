// Draw conflict graphs in both topology modes, measure their density and
// evaluate SINR for a few schedules.
//
//     cargo run --example conflict_graph

use pccsched::env::{compute_sinr, is_safe_set, measure_density, reset, EnvConfig, Schedule, TopologyMode};

pub fn run_example() -> pccsched::Result<()> {
    let random = EnvConfig::default();
    let state = reset(&random, 7)?;
    println!(
        "random-graph: {} devices, {} conflicting pairs, density {:.3} (target {})",
        state.graph.n_vertices(),
        state.graph.n_edges(),
        measure_density(&state.graph),
        random.target_density
    );
    println!("device 0 conflicts with {:?}", state.graph.neighbors(0));

    let top4 = Schedule::new(0..4);
    println!("schedule {top4} independent: {}", is_safe_set(&top4, &state.graph));
    for d in top4.iter() {
        println!("  SINR of {d} within {top4}: {:.4}", compute_sinr(d, &top4, &state.channel)?);
    }

    let physical = EnvConfig { topology_mode: TopologyMode::Physical, ..EnvConfig::default() };
    let state = reset(&physical, 7)?;
    println!(
        "physical (alpha={}, gamma_min={}): density {:.3}",
        physical.pathloss_exponent,
        physical.sinr_threshold,
        measure_density(&state.graph)
    );
    let solo = Schedule::singleton(3);
    let sinr = compute_sinr(3, &solo, &state.channel)?;
    assert_eq!(sinr, state.channel.gains[3] / state.channel.noise_power);
    println!("device 3 alone: SINR {sinr:.1}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> pccsched::Result<()> {
    run_example()
}
