use serde::{Deserialize, Serialize};

use super::Certificate;
use crate::env::{is_safe_set, ConflictGraph, Schedule};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetConfig {
    pub beta_max: f64,
    /// Below this level multi-user schedules are replaced by a single user.
    pub beta_min: f64,
    pub cost_risky: f64,
    pub cost_neutral: f64,
    /// Credit applied on each conservative-override slot.
    pub recover: f64,
}

impl Default for BudgetConfig {
    /// The tight configuration: `beta_max = 8`, `beta_min = 6`, risky cost 4,
    /// neutral cost 1, recovery 1.
    fn default() -> Self {
        BudgetConfig {
            beta_max: 8.0,
            beta_min: 6.0,
            cost_risky: 4.0,
            cost_neutral: 1.0,
            recover: 1.0,
        }
    }
}

impl BudgetConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.beta_max, self.beta_min, self.cost_risky, self.cost_neutral, self.recover]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidConfig("budget parameters must be finite".into()));
        }
        if !(0.0 <= self.beta_min && self.beta_min <= self.beta_max) {
            return Err(Error::InvalidConfig(format!(
                "need 0 <= beta_min <= beta_max, got beta_min={} beta_max={}",
                self.beta_min, self.beta_max
            )));
        }
        if self.cost_risky < 0.0 || self.cost_neutral < 0.0 || self.recover < 0.0 {
            return Err(Error::InvalidConfig("budget costs and recovery must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetState {
    pub beta: f64,
}

impl BudgetState {
    pub fn full(config: &BudgetConfig) -> Self {
        BudgetState { beta: config.beta_max }
    }
}

/// `beta <- min(beta_max, beta - cost + recover)`, floored at zero.
pub fn budget_update(state: BudgetState, config: &BudgetConfig, cost: f64, recover: f64) -> BudgetState {
    let beta = (state.beta - cost + recover).min(config.beta_max).max(0.0);
    BudgetState { beta }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionClass {
    Risky,
    Neutral,
}

/// A multi-device proposal that needed correction is risky; everything else
/// (empty, single-user, or already conflict-free) is neutral.
pub fn classify_action(certificate: &Certificate) -> ActionClass {
    if certificate.proposal.len() > 1 && certificate.is_corrected() {
        ActionClass::Risky
    } else {
        ActionClass::Neutral
    }
}

/// The backlogged device with the longest queue (lowest index on ties), or
/// nothing when every queue is empty.
pub fn conservative_action(queues: &[u32], graph: &ConflictGraph) -> Schedule {
    let pick = queues
        .iter()
        .enumerate()
        .filter(|(_, &q)| q > 0)
        .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))
        .map(|(i, _)| i);
    let s = pick.map(Schedule::singleton).unwrap_or_default();
    debug_assert!(is_safe_set(&s, graph));
    s
}

/// Audit record of one slot's path through verification and the budget gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotDecision {
    pub proposal: Schedule,
    pub certificate: Certificate,
    pub eb_blocked: bool,
    pub executed: Schedule,
    pub action_class: ActionClass,
    pub cost_charged: f64,
    pub recover_applied: f64,
    pub beta_after: f64,
}

/// Applies the empowerment budget to a certified schedule.
///
/// A certified multi-user set is replaced by [`conservative_action`] when the
/// current budget is below `beta_min`; those override slots earn the recovery
/// credit. The action's class cost is charged on every slot.
pub fn gate(
    certificate: &Certificate,
    budget: BudgetState,
    config: &BudgetConfig,
    queues: &[u32],
    graph: &ConflictGraph,
) -> SlotDecision {
    let eb_blocked = certificate.certified_set.len() > 1 && budget.beta < config.beta_min;
    let (executed, recover_applied) = if eb_blocked {
        (conservative_action(queues, graph), config.recover)
    } else {
        (certificate.certified_set.clone(), 0.0)
    };
    let action_class = classify_action(certificate);
    let cost_charged = match action_class {
        ActionClass::Risky => config.cost_risky,
        ActionClass::Neutral => config.cost_neutral,
    };
    let beta_after = budget_update(budget, config, cost_charged, recover_applied).beta;
    SlotDecision {
        proposal: certificate.proposal.clone(),
        certificate: certificate.clone(),
        eb_blocked,
        executed,
        action_class,
        cost_charged,
        recover_applied,
        beta_after,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::safety::verify_schedule;

    const CFG: BudgetConfig = BudgetConfig {
        beta_max: 8.0,
        beta_min: 6.0,
        cost_risky: 4.0,
        cost_neutral: 1.0,
        recover: 1.0,
    };

    #[test]
    fn update_examples() {
        let s = |b| BudgetState { beta: b };
        assert_eq!(budget_update(s(8.0), &CFG, 4.0, 0.0).beta, 4.0);
        assert_eq!(budget_update(s(8.0), &CFG, 0.0, 2.0).beta, 8.0);
        assert_eq!(budget_update(s(0.0), &CFG, 4.0, 0.0).beta, 0.0);
    }

    #[test]
    fn classification() {
        let g = ConflictGraph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        let q = [1; 4];
        let corrected = verify_schedule(&Schedule::new([0, 1, 2]), &g, &q);
        assert_eq!(classify_action(&corrected), ActionClass::Risky);
        let single = verify_schedule(&Schedule::singleton(1), &g, &q);
        assert_eq!(classify_action(&single), ActionClass::Neutral);
        let safe_pair = verify_schedule(&Schedule::new([0, 2]), &g, &q);
        assert_eq!(classify_action(&safe_pair), ActionClass::Neutral);
    }

    #[test]
    fn conservative_examples() {
        let g = ConflictGraph::empty(3);
        assert_eq!(conservative_action(&[0, 5, 5], &g), Schedule::singleton(1));
        assert_eq!(conservative_action(&[0, 0, 0], &g), Schedule::empty());
        assert_eq!(conservative_action(&[2, 7, 1], &g), Schedule::singleton(1));
    }

    #[test]
    fn gate_passes_multi_user_with_full_budget() {
        let g = ConflictGraph::empty(5);
        let q = [3; 5];
        let cert = verify_schedule(&Schedule::new([0, 1, 2]), &g, &q);
        let d = gate(&cert, BudgetState { beta: 8.0 }, &CFG, &q, &g);
        assert!(!d.eb_blocked);
        assert_eq!(d.executed, Schedule::new([0, 1, 2]));
        assert_eq!(d.cost_charged, 1.0);
        assert_eq!(d.recover_applied, 0.0);
        assert_eq!(d.beta_after, 7.0);
    }

    #[test]
    fn gate_blocks_multi_user_below_threshold() {
        let g = ConflictGraph::empty(5);
        let q = [1, 4, 2, 2, 0];
        let cert = verify_schedule(&Schedule::new([0, 1, 2, 3]), &g, &q);
        let d = gate(&cert, BudgetState { beta: 4.0 }, &CFG, &q, &g);
        assert!(d.eb_blocked);
        assert_eq!(d.executed, Schedule::singleton(1));
        assert_eq!(d.recover_applied, 1.0);
        assert_eq!(d.beta_after, 4.0);
    }

    #[test]
    fn gate_never_blocks_singletons() {
        let g = ConflictGraph::empty(5);
        let q = [1; 5];
        let cert = verify_schedule(&Schedule::singleton(3), &g, &q);
        let d = gate(&cert, BudgetState { beta: 4.0 }, &CFG, &q, &g);
        assert!(!d.eb_blocked);
        assert_eq!(d.executed, Schedule::singleton(3));
        assert_eq!(d.beta_after, 3.0);
    }

    #[test]
    fn config_validation() {
        assert!(CFG.validate().is_ok());
        assert!(BudgetConfig { beta_min: 9.0, ..CFG }.validate().is_err());
        assert!(BudgetConfig { cost_risky: -1.0, ..CFG }.validate().is_err());
    }
}
