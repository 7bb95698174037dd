//! Pre-execution safety: certificates over the conflict graph and the
//! empowerment budget that rations multi-user autonomy.

mod budget;
mod pcc;

pub use budget::{
    budget_update, classify_action, conservative_action, gate, ActionClass, BudgetConfig,
    BudgetState, SlotDecision,
};
pub use pcc::{check_certificate, greedy_mis, verify_schedule, Certificate, Verdict};
