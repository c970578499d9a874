//! Per-team episode reward.

use serde::Serialize;

/// Event counts and the distance aggregate behind a team's return.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TeamCounts {
    /// Enemy agents this team shot down.
    pub kills: u32,
    /// This team's agents that reached the enemy base.
    pub base_collisions: u32,
    /// Mean over the team's agents of the distance to the enemy base at
    /// episode end; dead agents contribute the distance frozen at death.
    pub mean_final_distance: f64,
}

/// `J = 10*kills + 50*base_collisions - 1e-5*distance`, exactly.
pub fn compute_reward(kills: u32, base_collisions: u32, mean_final_distance: f64) -> f64 {
    10.0 * f64::from(kills) + 50.0 * f64::from(base_collisions) - 1e-5 * mean_final_distance
}

impl TeamCounts {
    pub fn reward(&self) -> f64 {
        compute_reward(self.kills, self.base_collisions, self.mean_final_distance)
    }
}
