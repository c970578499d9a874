//! Stochastic-search optimization and multi-agent aerial combat training.
//!
//! The crate is organized in five layers:
//!
//! * [`search`] — the optimization kernel: Gaussian search distributions,
//!   rank-based fitness shaping, GASS / ES / CEM update rules, ADAM
//!   learning-rate adaptation, and learning-rate / sample-size schedules.
//! * [`policy`] — the structured per-agent policy: observation encoding,
//!   feedforward heading network, collision-avoidance safety override, and
//!   PID low-level control.
//! * [`sim`] — the deterministic-given-seed world: reduced-order fixed-wing
//!   and quadcopter dynamics with additive Gaussian disturbances, cone-based
//!   weapons, collisions, scripted base defenders, reward computation, and
//!   the episode loop.
//! * [`scenario`] — concrete experiment setups (base attack, two-team
//!   competitive match) with seeded spawn randomization and desk-scale
//!   shrinking.
//! * [`harness`] — the training loop: perturbation sampling, parallel
//!   episode evaluation with deterministic reduction, self-play, evaluation
//!   statistics, and checkpoint hooks.
//!
//! Every random draw anywhere in the crate flows from an explicit seed
//! through [`rng::derive_seed`], so identical inputs always reproduce
//! identical outputs bit for bit, regardless of thread count.

pub mod error;
pub mod harness;
pub mod policy;
pub mod rng;
pub mod scenario;
pub mod search;
pub mod sim;
pub mod vec3;

pub use error::{Error, Result};
pub use vec3::Vec3;
