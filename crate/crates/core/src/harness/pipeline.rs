use serde::Serialize;

use super::{ExperimentConfig, System};
use crate::agents::{
    baseline_reactive_wrap, build_batch, gae_advantages, ppo_update, schedule_log_prob, Adam, Agent,
    Observation, PolicyParams, Proposal, Transition,
};
use crate::env::{reset, EnvState, StepOutcome};
use crate::metrics::{finalize_episode, EpisodeMetrics, SlotRecord};
use crate::rng::{self, Rng, Stream};
use crate::safety::{check_certificate, classify_action, gate, verify_schedule, BudgetConfig, BudgetState, SlotDecision};
use crate::{Error, Result};

/// Builds the agent's view of the current slot. Systems without a budget
/// report a full budget.
pub fn observe(env: &EnvState, budget: BudgetState, budget_cfg: &BudgetConfig, observe_degrees: bool) -> Observation {
    let frac = if budget_cfg.beta_max > 0.0 { budget.beta / budget_cfg.beta_max } else { 1.0 };
    Observation::new(&env.queues, env.config().queue_cap, frac, &env.graph, observe_degrees)
}

/// Everything that happened in one slot.
#[derive(Debug, Clone)]
pub struct SlotOutput {
    pub observation: Observation,
    pub proposal: Proposal,
    pub decision: SlotDecision,
    pub outcome: StepOutcome,
    pub record: SlotRecord,
}

/// One slot of `system`: propose, pass through the system's safety path,
/// execute with exactly one environment step.
///
/// The certificate is computed for every system so the decision record is
/// complete; only the reactive and proactive systems act on it.
pub fn run_slot(
    system: System,
    agent: &Agent,
    env: &mut EnvState,
    budget: &mut BudgetState,
    budget_cfg: &BudgetConfig,
    observe_degrees: bool,
    rng: &mut Rng,
) -> Result<SlotOutput> {
    let n_channels = env.config().n_channels;
    let observation = observe(env, *budget, budget_cfg, observe_degrees);
    let proposal = agent.propose(&observation, &env.queues, n_channels, rng);
    let certificate = verify_schedule(&proposal.schedule, &env.graph, &env.queues);

    let decision = match system {
        System::Proactive => gate(&certificate, *budget, budget_cfg, &env.queues, &env.graph),
        System::Unconstrained | System::Reactive => {
            let executed = if system == System::Reactive {
                baseline_reactive_wrap(&proposal.schedule, &env.graph, &env.queues).0
            } else {
                proposal.schedule.clone()
            };
            SlotDecision {
                proposal: proposal.schedule.clone(),
                action_class: classify_action(&certificate),
                certificate,
                eb_blocked: false,
                executed,
                cost_charged: 0.0,
                recover_applied: 0.0,
                beta_after: budget.beta,
            }
        }
    };

    if system.is_safety_aware() && !check_certificate(&decision.certificate, &env.graph) {
        return Err(Error::SafetyInvariant(format!(
            "slot {}: certificate for {} failed re-verification",
            env.slot_index, decision.proposal
        )));
    }

    let slot_index = env.slot_index;
    let outcome = env.step(&decision.executed)?;
    if system.is_safety_aware() && outcome.violation {
        return Err(Error::SafetyInvariant(format!(
            "slot {slot_index}: {system} executed dependent set {}",
            decision.executed
        )));
    }
    budget.beta = decision.beta_after;

    let record = SlotRecord {
        slot_index,
        proposal_size: decision.proposal.len(),
        was_unsafe_proposal: system.is_safety_aware() && decision.certificate.is_corrected(),
        eb_blocked: decision.eb_blocked,
        executed_size: decision.executed.len(),
        unmodified: decision.executed == decision.proposal,
        served: outcome.served,
        violation: outcome.violation,
        beta_after: decision.beta_after,
    };
    Ok(SlotOutput { observation, proposal, decision, outcome, record })
}

/// Line-delimited trace entry for debugging a single episode.
#[derive(Debug, Clone, Serialize)]
pub struct SlotTrace {
    pub slot: usize,
    pub queues_before: Vec<u32>,
    pub decision: SlotDecision,
    pub outcome: StepOutcome,
}

#[derive(Debug, Clone, Default)]
pub struct EpisodeResult {
    pub metrics: EpisodeMetrics,
    pub records: Vec<SlotRecord>,
    pub transitions: Vec<Transition>,
    pub trace: Vec<SlotTrace>,
}

/// Runs one full episode with frozen agent parameters.
pub fn run_episode(
    config: &ExperimentConfig,
    system: System,
    agent: &Agent,
    episode_seed: u64,
    rng: &mut Rng,
    keep_trace: bool,
) -> Result<EpisodeResult> {
    let mut env = reset(&config.env, episode_seed)?;
    let mut budget = BudgetState::full(&config.budget);
    let t = config.env.slots_per_episode;
    let mut result = EpisodeResult { records: Vec::with_capacity(t), ..Default::default() };
    while !env.is_done() {
        let queues_before = if keep_trace { env.queues.clone() } else { Vec::new() };
        let out = run_slot(system, agent, &mut env, &mut budget, &config.budget, config.observe_degrees, rng)?;
        if keep_trace {
            result.trace.push(SlotTrace {
                slot: out.record.slot_index,
                queues_before,
                decision: out.decision,
                outcome: out.outcome,
            });
        }
        result.records.push(out.record);
    }
    debug_assert_eq!(result.records.len(), t);
    result.metrics = finalize_episode(&result.records)?;
    Ok(result)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingReport {
    pub updates: usize,
    /// Mean per-slot reward of each rollout, before its update.
    pub rollout_reward: Vec<f64>,
    pub episodes_started: usize,
}

/// Trains `params` in place with PPO inside `system`'s pipeline. Rollouts
/// run continuously across episode boundaries; the likelihood stored with
/// each transition is that of the executed schedule.
pub fn train_agent(
    config: &ExperimentConfig,
    system: System,
    params: PolicyParams,
    seed: u64,
) -> Result<(PolicyParams, TrainingReport)> {
    let mut report = TrainingReport::default();
    let mut policy_rng = rng::stream(seed, Stream::Policy);
    let mut shuffle_rng = rng::stream(seed, Stream::Training);
    let train_episode_seed = |k: usize| rng::derive_seed(&[seed, rng::label("train"), k as u64]);

    let mut optimizer = Adam::new(params.data.len());
    let mut agent = Agent::Ppo(params);
    let mut env = reset(&config.env, train_episode_seed(0))?;
    let mut budget = BudgetState::full(&config.budget);
    report.episodes_started = 1;

    for _ in 0..config.train_updates {
        let mut rollout = Vec::with_capacity(config.ppo.rollout_length);
        for _ in 0..config.ppo.rollout_length {
            if env.is_done() {
                env = reset(&config.env, train_episode_seed(report.episodes_started))?;
                budget = BudgetState::full(&config.budget);
                report.episodes_started += 1;
            }
            let out = run_slot(system, &agent, &mut env, &mut budget, &config.budget, config.observe_degrees, &mut policy_rng)?;
            let Agent::Ppo(p) = &agent else { unreachable!() };
            rollout.push(Transition {
                log_prob: schedule_log_prob(p, &out.observation, &out.decision.executed),
                observation: out.observation,
                executed: out.decision.executed,
                reward: out.outcome.served as f64,
                value: out.proposal.value.unwrap_or(0.0),
                done: env.is_done(),
            });
        }
        let Agent::Ppo(p) = &mut agent else { unreachable!() };
        let bootstrap = if env.is_done() {
            0.0
        } else {
            p.forward(&observe(&env, budget, &config.budget, config.observe_degrees)).value
        };
        let adv = gae_advantages(&rollout, bootstrap, &config.ppo)?;
        let batch = build_batch(&rollout, &adv);
        report.rollout_reward.push(rollout.iter().map(|t| t.reward).sum::<f64>() / rollout.len() as f64);
        ppo_update(p, &mut optimizer, &batch, &config.ppo, &mut shuffle_rng)?;
        report.updates += 1;
    }
    let Agent::Ppo(params) = agent else { unreachable!() };
    Ok((params, report))
}
