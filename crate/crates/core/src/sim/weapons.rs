//! Cone-gated weapons with area- and range-dependent hit probability.

use serde::{Deserialize, Serialize};

use crate::sim::{AgentState, VehicleKind};
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeaponSpec {
    /// Cone half-angle around the nose (rad).
    pub half_angle: f64,
    /// Maximum engagement range (m).
    pub max_range: f64,
    /// Minimum time between shots (s).
    pub fire_period: f64,
    /// Hit probability at zero range for a target presenting `a_ref`.
    pub p_max: f64,
    /// Reference presented area (m^2); the fixed-wing planform area, so
    /// a full top-down silhouette at point-blank range gives `p_max`.
    pub a_ref: f64,
}

impl Default for WeaponSpec {
    fn default() -> Self {
        WeaponSpec {
            half_angle: 15f64.to_radians(),
            max_range: 300.0,
            fire_period: 0.5,
            p_max: 0.8,
            a_ref: 4.0,
        }
    }
}

/// Ellipsoid half-extents (m) along the body axes (length/2 forward,
/// span/2 lateral, height/2 vertical) used for the presented-area model.
fn half_extents(kind: VehicleKind) -> (f64, f64, f64) {
    match kind {
        VehicleKind::FixedWing => (1.5, 1.0, 0.3),
        VehicleKind::Quadcopter => (0.4, 0.4, 0.2),
    }
}

/// Projected area of the target's body ellipsoid as seen along `view_dir`
/// (unit vector pointing from the target toward the viewer, world frame):
/// `pi * sqrt((b c u1)^2 + (a c u2)^2 + (a b u3)^2)` with `u` expressed in
/// the target's body frame. Roll is neglected.
pub fn presented_area(target: &AgentState, view_dir: Vec3) -> f64 {
    let (a, b, c) = half_extents(target.kind);
    let fwd = target.nose_dir();
    let (sy, cy) = target.yaw().sin_cos();
    let right = Vec3::new(-sy, cy, 0.0);
    let up = Vec3::new(
        fwd.y * right.z - fwd.z * right.y,
        fwd.z * right.x - fwd.x * right.z,
        fwd.x * right.y - fwd.y * right.x,
    );
    let u1 = view_dir.dot(fwd);
    let u2 = view_dir.dot(right);
    let u3 = view_dir.dot(up);
    std::f64::consts::PI * ((b * c * u1).powi(2) + (a * c * u2).powi(2) + (a * b * u3).powi(2)).sqrt()
}

/// Hit probability for a shot from `attacker` at `target` over distance `d`.
pub fn hit_probability(attacker_spec: &WeaponSpec, target: &AgentState, from: Vec3, d: f64) -> f64 {
    if d > attacker_spec.max_range {
        return 0.0;
    }
    let view = (from - target.pos).normalized().unwrap_or(Vec3::new(1.0, 0.0, 0.0));
    let area = presented_area(target, view);
    (attacker_spec.p_max * (area / attacker_spec.a_ref) * (1.0 - d / attacker_spec.max_range))
        .clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotOutcome {
    pub target: crate::sim::AgentId,
    pub hit: bool,
    pub probability: f64,
}

/// Fire at the nearest living enemy inside the cone and range, if any.
///
/// `hit_draw` is a uniform [0,1) draw from the caller's weapon substream;
/// the shot hits when `hit_draw < p`. Cooldown bookkeeping stays with the
/// caller.
pub fn weapons_check(
    attacker: &AgentState,
    candidates: &[AgentState],
    spec: &WeaponSpec,
    hit_draw: f64,
) -> Option<ShotOutcome> {
    if !attacker.alive {
        return None;
    }
    let nose = attacker.nose_dir();
    let mut best: Option<(f64, &AgentState)> = None;
    for target in candidates {
        if !target.alive || target.team == attacker.team || target.id == attacker.id {
            continue;
        }
        let rel = target.pos - attacker.pos;
        let d = rel.norm();
        if d > spec.max_range || d < 1e-9 {
            continue;
        }
        let cos_angle = rel.dot(nose) / d;
        if cos_angle < spec.half_angle.cos() {
            continue;
        }
        if best.map_or(true, |(bd, b)| d < bd || (d == bd && target.id < b.id)) {
            best = Some((d, target));
        }
    }
    best.map(|(d, target)| {
        let p = hit_probability(spec, target, attacker.pos, d);
        ShotOutcome { target: target.id, hit: hit_draw < p, probability: p }
    })
}
