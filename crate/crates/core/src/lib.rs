//! Safety-constrained scheduling for wireless uplinks.
//!
//! A discrete-time uplink simulator with a conflict-graph interference model,
//! a pre-execution verifier that certifies every executed schedule as an
//! independent set (correcting unsafe proposals with a greedy maximal
//! independent set), an empowerment budget that rations multi-user autonomy,
//! a compact PPO learner trained on executed actions, and an experiment
//! harness that sweeps offered load and emits CSV metrics.
//!
//! The pieces compose as a per-slot pipeline:
//!
//! ```text
//! agent proposal ──► verify_schedule ──► gate (budget) ──► env_step
//!                    (certificate)       (SlotDecision)    (StepOutcome)
//! ```
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod agents;
pub mod env;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod rng;
pub mod safety;

pub use error::{Error, Result};
