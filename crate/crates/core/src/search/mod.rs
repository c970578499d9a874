//! Optimization kernel: sampling, fitness shaping, update rules, schedules.
//!
//! Three update modes share one interface ([`Optimizer`]):
//!
//! * **ES** — perturb a parameter vector with Gaussian noise of standard
//!   deviation `gamma`, weight the noise vectors by centered-rank-shaped
//!   returns, and step the vector (optionally through ADAM).
//! * **GASS** — maintain an independent Gaussian per coordinate and ascend
//!   the natural parameters `[mu/sigma^2, -1/(2 sigma^2)]` with a per
//!   coordinate 2x2 variance preconditioner; requires strictly positive
//!   shaped weights.
//! * **CEM** — refit the Gaussian to the elite fraction of samples.
//!
//! All operations are pure functions of their inputs plus an explicit seed;
//! repeated calls are bitwise identical.

mod adam;
mod config;
mod distribution;
mod optimizer;
mod schedule;
mod shaping;
mod update;
mod variance;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use config::{Mode, OptimizerConfig};
pub use distribution::{sample_epsilons, sample_population, ScoredSample, SearchDistribution};
pub use optimizer::{Optimizer, OptimizerState, Population};
pub use schedule::schedule;
pub use shaping::{positive_rank_shape, rank_shape};
pub use update::{
    cem_update, es_update, gass_update, gass_update_first_order, UpdateReport, SIGMA_MIN,
};
pub use variance::estimate_variance_2x2;
