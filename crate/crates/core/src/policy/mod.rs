//! Structured per-agent policy: observation encoding, neural heading
//! proposal, safety override, and PID low-level control.
//!
//! The pipeline for one agent and one step is
//!
//! ```text
//! encode_observation -> normalize_observation -> forward
//!     -> safety_override -> pid_control -> ControlCommand
//! ```
//!
//! Every stage is a deterministic function of its inputs; the only carried
//! state is the explicit [`PidState`] value.

mod network;
mod observation;
mod pid;
mod safety;

pub use network::{forward, heading_from_output, HeadingTarget, PolicyParams, PolicyShape, R_MAX};
pub use observation::{
    encode_observation, normalize_observation, Observation, ALLY_SLOTS, ENEMY_SLOTS, OBS_LEN,
};
pub use pid::{pid_control, ControlCommand, PidChannel, PidGains, PidState};
pub use safety::{safety_override, SafetyConfig};
