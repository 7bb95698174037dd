//! Command-line front end: `run`, `episode`, `calibrate`, `gradcheck`.

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::{calibrate, cell_seed, episode_seed, run_episode, run_experiment, train_agent, ExperimentConfig, System};
use crate::agents::{gradcheck, Agent, AgentKind, PolicyParams};
use crate::rng::{self, derive_seed, label, Stream};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "pccsched", about = "Safety-constrained uplink scheduling experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full sweep over systems, offered loads and seeds; writes CSVs.
    Run(RunArgs),
    /// One evaluation episode with a per-slot trace.
    Episode(EpisodeArgs),
    /// Measure conflict density over sampled topologies.
    Calibrate(CalibrateArgs),
    /// Finite-difference check of the PPO loss gradient.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated subset of unconstrained,reactive,proactive.
    #[arg(long)]
    pub systems: Option<String>,
    #[arg(long)]
    pub lambdas: Option<String>,
    #[arg(long)]
    pub seeds: Option<String>,
    /// Slots per episode.
    #[arg(long)]
    pub slots: Option<usize>,
    /// ppo, greedy or random.
    #[arg(long)]
    pub agent: Option<String>,
    /// Override any config key, e.g. `--set beta_max=12`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        let pairs = [
            ("systems", self.systems.clone()),
            ("lambdas", self.lambdas.clone()),
            ("seeds", self.seeds.clone()),
            ("slots", self.slots.map(|s| s.to_string())),
            ("agent", self.agent.clone()),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        for kv in &self.overrides {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k.trim(), v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct EpisodeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "proactive")]
    pub system: String,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 11)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub episode: usize,
    /// Write the JSON-lines trace here instead of stdout.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long)]
    pub devices: Option<usize>,
    #[arg(long)]
    pub topology: Option<String>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub hidden: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub step: f64,
}

/// Relative-error threshold for `gradcheck`.
pub const GRADCHECK_TOLERANCE: f64 = 1e-4;

/// Parses `args` (including the program name) and runs. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return 0;
            }
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("invalid arguments"));
            return 2;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run(a) => cmd_run(a),
        Command::Episode(a) => cmd_episode(a),
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Gradcheck(a) => cmd_gradcheck(a),
    }
}

fn cmd_run(a: RunArgs) -> Result<i32> {
    let cfg = a.common.resolve()?;
    if !a.quiet {
        eprintln!(
            "running {} systems x {} loads x {} seeds x {} episodes (agent {:?}, T={})",
            cfg.systems.len(),
            cfg.lambdas.len(),
            cfg.seeds.len(),
            cfg.eval_episodes,
            cfg.agent_kind,
            cfg.env.slots_per_episode
        );
    }
    let out = run_experiment(&cfg)?;
    let (cells, agg) = out.emit(&a.out)?;
    for f in &out.failures {
        eprintln!("cell {} lambda={} seed={} failed: {}", f.system, f.lambda, f.seed, f.error);
    }
    if !a.quiet {
        for s in &out.aggregate {
            println!(
                "{:<13} lambda={:<4} throughput={:>7.1} prevented={:>6.1} eb_blocks={:>6.1} aix={:.4} violations={:.1}",
                s.system.name(),
                s.lambda,
                s.mean("throughput"),
                s.mean("prevented_unsafe"),
                s.mean("eb_blocks"),
                s.mean("aix"),
                s.mean("violations")
            );
        }
        eprintln!("wrote {} and {}", cells.display(), agg.display());
    }
    Ok(if out.failures.is_empty() { 0 } else { 1 })
}

fn cmd_episode(a: EpisodeArgs) -> Result<i32> {
    let mut cfg = a.common.resolve()?;
    let system: System = a.system.parse()?;
    if !(0.0..=1.0).contains(&a.lambda) {
        return Err(Error::InvalidConfig(format!("lambda {} outside [0,1]", a.lambda)));
    }
    cfg.env.arrival_prob = a.lambda;
    let cseed = cell_seed(cfg.master_seed, system, a.lambda, a.seed);
    let agent = match cfg.agent_kind {
        AgentKind::Greedy => Agent::Greedy,
        AgentKind::Random => Agent::Random,
        AgentKind::Ppo => {
            let init = PolicyParams::init(cfg.env.n_devices, cfg.env.n_channels, cfg.ppo.hidden, cseed);
            Agent::Ppo(train_agent(&cfg, system, init, cseed)?.0)
        }
    };
    let mut policy_rng = rng::stream(derive_seed(&[cseed, label("eval"), a.episode as u64]), Stream::Policy);
    let eseed = episode_seed(cfg.master_seed, a.seed, a.episode);
    let r = run_episode(&cfg, system, &agent, eseed, &mut policy_rng, true)?;

    let mut sink: Box<dyn std::io::Write> = match &a.trace {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p).map_err(|e| Error::io(p, e))?)),
        None => Box::new(std::io::stdout().lock()),
    };
    let trace_err = |e: std::io::Error| Error::io(a.trace.clone().unwrap_or_else(|| "<stdout>".into()), e);
    for t in &r.trace {
        let line = serde_json::to_string(t).expect("trace records serialize");
        writeln!(sink, "{line}").map_err(trace_err)?;
    }
    sink.flush().map_err(trace_err)?;
    let m = r.metrics;
    eprintln!(
        "{system} lambda={} seed={} episode={}: throughput={} prevented={} eb_blocks={} aix={} violations={}",
        a.lambda, a.seed, a.episode, m.throughput, m.prevented_unsafe, m.eb_blocks, m.aix, m.violations
    );
    Ok(0)
}

fn cmd_calibrate(a: CalibrateArgs) -> Result<i32> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(d) = a.density {
        cfg.env.target_density = d;
    }
    if let Some(n) = a.devices {
        cfg.env.n_devices = n;
        cfg.env.n_channels = cfg.env.n_channels.min(n);
    }
    if let Some(t) = &a.topology {
        cfg.env.topology_mode = t.parse()?;
    }
    cfg.env.validate()?;
    let r = calibrate(&cfg.env, a.samples, cfg.master_seed)?;
    println!(
        "mean density {:.4} (std {:.4}, min {:.4}, max {:.4}) over {} topologies; target {}",
        r.mean, r.std, r.min, r.max, r.samples, r.target
    );
    Ok(0)
}

fn cmd_gradcheck(a: GradcheckArgs) -> Result<i32> {
    let r = gradcheck(a.seed, a.hidden, a.step);
    println!(
        "max relative error {:.3e} (max abs {:.3e}) over {} parameters, {} clipped samples",
        r.max_rel_error, r.max_abs_error, r.n_params, r.clipped_samples
    );
    if r.max_rel_error < GRADCHECK_TOLERANCE {
        Ok(0)
    } else {
        eprintln!("gradient check failed: {:.3e} >= {GRADCHECK_TOLERANCE:e}", r.max_rel_error);
        Ok(1)
    }
}
