//! Exit criteria for the tight-budget experiment (N=30, M=4, density 0.34,
//! T=1000, beta_max=8, beta_min=6, c_r=4, c_n=1, recover=1; 3 seeds x 5
//! episodes; greedy agent unless noted). Each test prints one PASS/FAIL line.

use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use pccsched::agents::{gradcheck, AgentKind};
use pccsched::env::{is_safe_set, ConflictGraph, Schedule};
use pccsched::harness::{run_experiment, ExperimentConfig, ExperimentOutput, System};
use pccsched::safety::{budget_update, greedy_mis, BudgetConfig, BudgetState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LAMBDAS: [f64; 4] = [0.2, 0.4, 0.7, 1.0];
const T: f64 = 1000.0;

fn report(id: u32, ok: bool, detail: String) {
    println!("[{}] criterion {id:>2}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}

fn greedy_config() -> ExperimentConfig {
    ExperimentConfig { agent_kind: AgentKind::Greedy, ..ExperimentConfig::default() }
}

/// The full greedy sweep, run once and shared.
fn sweep() -> &'static (ExperimentOutput, Duration) {
    static SWEEP: OnceLock<(ExperimentOutput, Duration)> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let start = Instant::now();
        let out = run_experiment(&greedy_config()).expect("sweep runs");
        (out, start.elapsed())
    })
}

fn mean(system: System, lambda: f64, metric: &str) -> f64 {
    sweep().0.stats(system, lambda).expect("group present").mean(metric)
}

fn episodes(system: System, lambda: f64) -> impl Iterator<Item = &'static pccsched::metrics::EpisodeMetrics> {
    sweep().0.cells.iter().filter(move |c| c.system == system && c.lambda == lambda).map(|c| &c.metrics)
}

#[test]
fn c01_zero_violations_for_safety_aware_systems() {
    let (out, elapsed) = sweep();
    assert!(out.failures.is_empty(), "{:?}", out.failures);
    let cells: Vec<_> = out.cells.iter().filter(|c| c.system.is_safety_aware()).collect();
    let violations: u64 = cells.iter().map(|c| c.metrics.violations).sum();
    let slots: u64 = cells.iter().map(|c| c.metrics.n_decisions).sum();
    let ok = violations == 0 && cells.len() == 2 * 4 * 3 * 5 && elapsed.as_secs_f64() < 120.0;
    report(1, ok, format!("{violations} violations over {} episodes / {slots} slots in {:.2?}", cells.len(), elapsed));
}

#[test]
fn c02_unconstrained_saturates() {
    let t = mean(System::Unconstrained, 1.0, "throughput");
    report(2, (3900.0..=4000.0).contains(&t), format!("unconstrained throughput at lambda=1.0: {t:.1} (band [3900, 4000])"));
}

#[test]
fn c03_proactive_serves_about_t() {
    let ts: Vec<f64> = LAMBDAS.iter().map(|&l| mean(System::Proactive, l, "throughput")).collect();
    let ok = ts.iter().all(|t| (995.0..=1015.0).contains(t));
    report(3, ok, format!("proactive throughput by lambda {ts:?} (band [995, 1015])"));
}

#[test]
fn c04_autonomy_index() {
    let means: Vec<f64> = LAMBDAS.iter().map(|&l| mean(System::Proactive, l, "aix")).collect();
    let in_band = means.iter().all(|a| (0.0005..=0.005).contains(a));
    let all: Vec<f64> = LAMBDAS.iter().flat_map(|&l| episodes(System::Proactive, l).map(|m| m.aix)).collect();
    let exact = all.iter().filter(|&&a| a == 1.0 / T).count();
    let ok = in_band && exact == all.len();
    report(
        4,
        ok,
        format!(
            "proactive AIx means {means:?} in [0.0005, 0.005]: {in_band}; episodes with AIx exactly 1/T: {exact}/{}",
            all.len()
        ),
    );
}

#[test]
fn c05_eb_blocks() {
    let rows: Vec<(f64, f64, u64)> = [0.4, 0.7, 1.0]
        .iter()
        .map(|&l| {
            let min = episodes(System::Proactive, l).map(|m| m.eb_blocks).min().unwrap();
            (l, mean(System::Proactive, l, "eb_blocks"), min)
        })
        .collect();
    let ok = rows.iter().all(|&(_, m, _)| (900.0..=1000.0).contains(&m));
    report(5, ok, format!("proactive EB blocks (lambda, mean, episode min) {rows:?} (band [900, 1000])"));
}

#[test]
fn c06_prevented_unsafe() {
    let mut rows = Vec::new();
    for system in [System::Reactive, System::Proactive] {
        for l in LAMBDAS {
            rows.push((system.name(), l, mean(system, l, "prevented_unsafe")));
        }
    }
    let ok = rows.iter().all(|&(_, _, m)| (800.0..=1000.0).contains(&m));
    report(6, ok, format!("prevented-unsafe means {rows:?} (band [800, 1000])"));
}

#[test]
fn c07_throughput_ordering() {
    let mut ok = true;
    let mut rows = Vec::new();
    for l in LAMBDAS {
        let (p, r, u) = (
            mean(System::Proactive, l, "throughput"),
            mean(System::Reactive, l, "throughput"),
            mean(System::Unconstrained, l, "throughput"),
        );
        ok &= p < r && r < u && (1800.0..=3200.0).contains(&r);
        rows.push((l, p, r, u));
    }
    report(7, ok, format!("(lambda, proactive, reactive, unconstrained) {rows:?}"));
}

/// Every independent subset of `proposal` that contains `mis`; the MIS is
/// maximal iff this is `mis` alone.
fn independent_supersets(proposal: &Schedule, mis: &Schedule, g: &ConflictGraph) -> usize {
    let m = proposal.members();
    (0u32..1 << m.len())
        .map(|mask| Schedule::new((0..m.len()).filter(|b| mask >> b & 1 == 1).map(|b| m[b])))
        .filter(|s| mis.is_subset_of(s) && is_safe_set(s, g))
        .count()
}

#[test]
fn c08_greedy_mis_matches_exhaustive_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=10);
        let p: f64 = rng.gen();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        let g = ConflictGraph::from_edges(n, &edges).unwrap();
        let proposal = Schedule::new((0..n).filter(|_| rng.gen_bool(0.6)));
        let queues: Vec<u32> = (0..n).map(|_| rng.gen_range(0..5)).collect();
        let mis = greedy_mis(&proposal, &g, &queues);
        // Brute-force independence: scan all pairs against the edge list.
        let independent = !edges.iter().any(|&(a, b)| mis.contains(a) && mis.contains(b));
        let maximal = independent_supersets(&proposal, &mis, &g) == 1;
        if !(independent && maximal && mis.is_subset_of(&proposal)) {
            bad += 1;
        }
    }
    let elapsed = start.elapsed();
    report(8, bad == 0 && elapsed.as_secs_f64() < 5.0, format!("{bad}/200 greedy MIS failures, {elapsed:.2?}"));
}

#[test]
fn c09_budget_recursion_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut mismatches = 0;
    let mut out_of_range = 0;
    for _ in 0..1000 {
        let beta_max = rng.gen_range(1.0..20.0);
        let cfg = BudgetConfig {
            beta_max,
            beta_min: rng.gen_range(0.0..=beta_max),
            cost_risky: rng.gen_range(0.0..6.0),
            cost_neutral: rng.gen_range(0.0..2.0),
            recover: rng.gen_range(0.0..3.0),
        };
        let steps: Vec<(f64, f64)> = (0..rng.gen_range(1..200))
            .map(|_| (rng.gen_range(0.0..6.0), rng.gen_range(0.0..3.0)))
            .collect();
        let mut state = BudgetState::full(&cfg);
        let mut direct = beta_max;
        for &(c, r) in &steps {
            state = budget_update(state, &cfg, c, r);
            direct = f64::max(0.0, f64::min(beta_max, direct - c + r));
            if state.beta.to_bits() != direct.to_bits() {
                mismatches += 1;
            }
            if !(0.0..=beta_max).contains(&state.beta) {
                out_of_range += 1;
            }
        }
    }
    report(9, mismatches == 0 && out_of_range == 0, format!("{mismatches} mismatches, {out_of_range} out-of-range over 1000 sequences"));
}

#[test]
fn c10_ppo_gradient_check() {
    let start = Instant::now();
    let r = gradcheck(0, 16, 1e-5);
    let elapsed = start.elapsed();
    report(
        10,
        r.max_rel_error < 1e-4 && elapsed.as_secs_f64() < 5.0,
        format!("max relative error {:.3e} over {} params ({} clipped samples), {elapsed:.2?}", r.max_rel_error, r.n_params, r.clipped_samples),
    );
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pccsched"))
}

#[test]
fn c11_run_is_byte_identical() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let st = bin().args(["run", "--agent", "greedy", "--quiet", "--out"]).arg(d.path()).status().unwrap();
        assert!(st.success());
    }
    let read = |d: &tempfile::TempDir, f: &str| std::fs::read(d.path().join(f)).unwrap();
    let same_cells = read(&dirs[0], "cells.csv") == read(&dirs[1], "cells.csv");
    let same_agg = read(&dirs[0], "aggregate.csv") == read(&dirs[1], "aggregate.csv");
    let rows = String::from_utf8(read(&dirs[0], "cells.csv")).unwrap().lines().count() - 1;
    report(11, same_cells && same_agg && rows == 180, format!("cells.csv identical: {same_cells}, aggregate.csv identical: {same_agg}, {rows} cell rows"));
}

#[test]
fn c12_density_calibration() {
    let out = bin().args(["calibrate", "--density", "0.34", "--samples", "1000"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let density: f64 = text
        .strip_prefix("mean density ")
        .and_then(|s| s.split_whitespace().next())
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(|| panic!("unexpected output: {text}"));
    report(12, (density - 0.34).abs() <= 0.02, format!("calibrate reported mean density {density} (target 0.34 +- 0.02)"));
}

#[test]
fn c13_ppo_beats_untrained_policy() {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        agent_kind: AgentKind::Ppo,
        systems: vec![System::Unconstrained],
        lambdas: vec![1.0],
        train_updates: 60,
        ..ExperimentConfig::default()
    };
    let trained = run_experiment(&cfg).unwrap();
    let untrained = run_experiment(&ExperimentConfig { train_updates: 0, ..cfg }).unwrap();
    let t = trained.stats(System::Unconstrained, 1.0).unwrap().mean("throughput");
    let u = untrained.stats(System::Unconstrained, 1.0).unwrap().mean("throughput");
    let frozen = trained.reports.iter().all(|r| r.fingerprint_before_eval == r.fingerprint_after_eval);
    let elapsed = start.elapsed();
    report(
        13,
        t >= 1.10 * u && frozen && elapsed.as_secs_f64() < 600.0,
        format!("trained {t:.1} vs untrained {u:.1} ({:+.1}%), eval frozen: {frozen}, {elapsed:.2?}", 100.0 * (t / u - 1.0)),
    );
}
