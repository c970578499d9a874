//! Reduced-order vehicle models.
//!
//! **Fixed wing** (10 states): coordinated-turn kinematics. Aileron commands
//! a bank angle tracked through a first-order lag; the turn rate is
//! `g/v * tan(roll)` plus a direct rudder contribution. Elevator commands a
//! flight-path angle through its own lag; thrust drives a lagged throttle
//! state that maps linearly onto the commanded airspeed. At trim (zero
//! deflections, thrust 0.5, speed 30 m/s) the aircraft flies an exact
//! straight line.
//!
//! **Quadcopter** (12 states): first-order velocity tracking toward a
//! commanded velocity, with yaw/pitch slewing toward an aim direction so
//! the weapons cone can point independently of motion. Hover is an exact
//! fixed point.
//!
//! Both models take their per-step disturbances as an explicit
//! [`StepNoise`] value, so stepping is a pure function.

use crate::error::{Error, Result};
use crate::policy::ControlCommand;
use crate::sim::{AgentState, VehicleKind};
use crate::vec3::{wrap_angle, Vec3};

pub const GRAVITY: f64 = 9.81;

// Fixed-wing envelope.
pub const FW_SPEED_MIN: f64 = 15.0;
pub const FW_SPEED_MAX: f64 = 45.0;
pub const FW_BANK_MAX: f64 = std::f64::consts::FRAC_PI_3;
pub const FW_GAMMA_MAX: f64 = 0.35;
const FW_ROLL_TAU: f64 = 0.5;
const FW_PITCH_TAU: f64 = 0.7;
const FW_THROTTLE_TAU: f64 = 1.0;
const FW_SPEED_TAU: f64 = 2.0;
const FW_RUDDER_RATE: f64 = 0.2;

// Quadcopter envelope.
pub const QUAD_SPEED_MAX: f64 = 20.0;
const QUAD_VEL_TAU: f64 = 0.8;
const QUAD_YAW_RATE: f64 = 2.0;
const QUAD_PITCH_RATE: f64 = 1.5;
const QUAD_VZ_MAX: f64 = 8.0;
const QUAD_ALT_GAIN: f64 = 1.0;
/// Scales normalized control noise onto quad velocity commands (m/s).
const QUAD_CMD_NOISE_SCALE: f64 = 10.0;

/// Trim airspeed: thrust 0.5 maps to the middle of the speed envelope.
pub const FW_TRIM_SPEED: f64 = 0.5 * (FW_SPEED_MIN + FW_SPEED_MAX);

/// Pre-drawn disturbances for one agent and one step. `zero()` disables
/// them entirely.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepNoise {
    /// Additive world-frame velocity disturbance (m/s).
    pub wind: Vec3,
    /// Additive actuator disturbance per channel (normalized units).
    pub control: [f64; 4],
}

impl StepNoise {
    pub fn zero() -> Self {
        StepNoise::default()
    }
}

fn check_state(state: &AgentState, kind: VehicleKind, op: &str) -> Result<()> {
    if state.kind != kind {
        return Err(Error::invalid_argument(format!(
            "{op} called on a {:?} agent",
            state.kind
        )));
    }
    if !state.is_finite() {
        return Err(Error::invalid_state(format!(
            "non-finite state for agent {}",
            state.id.0
        )));
    }
    Ok(())
}

/// Advance a fixed-wing agent one step of `dt` seconds.
pub fn step_fixed_wing(
    state: &AgentState,
    controls: &ControlCommand,
    dt: f64,
    noise: &StepNoise,
) -> Result<AgentState> {
    check_state(state, VehicleKind::FixedWing, "step_fixed_wing")?;

    let thrust = (controls.thrust + noise.control[0]).clamp(0.0, 1.0);
    let aileron = (controls.aileron + noise.control[1]).clamp(-1.0, 1.0);
    let elevator = (controls.elevator + noise.control[2]).clamp(-1.0, 1.0);
    let rudder = (controls.rudder + noise.control[3]).clamp(-1.0, 1.0);

    let mut next = state.clone();

    // Bank angle lag and coordinated turn.
    let roll_cmd = aileron * FW_BANK_MAX;
    let roll_rate = (roll_cmd - state.roll()) / FW_ROLL_TAU;
    let roll = (state.roll() + roll_rate * dt).clamp(-FW_BANK_MAX, FW_BANK_MAX);

    // Flight-path angle lag.
    let gamma_cmd = elevator * FW_GAMMA_MAX;
    let pitch_rate = (gamma_cmd - state.pitch()) / FW_PITCH_TAU;
    let gamma = (state.pitch() + pitch_rate * dt).clamp(-FW_GAMMA_MAX, FW_GAMMA_MAX);

    let yaw_rate = GRAVITY / state.speed * roll.tan() + rudder * FW_RUDDER_RATE;
    let yaw = wrap_angle(state.yaw() + yaw_rate * dt);

    // Throttle lag and speed tracking.
    let throttle = state.throttle + (thrust - state.throttle) / FW_THROTTLE_TAU * dt;
    let speed_cmd = FW_SPEED_MIN + throttle * (FW_SPEED_MAX - FW_SPEED_MIN);
    let speed =
        (state.speed + (speed_cmd - state.speed) / FW_SPEED_TAU * dt).clamp(FW_SPEED_MIN, FW_SPEED_MAX);

    let (sg, cg) = gamma.sin_cos();
    let (sy, cy) = yaw.sin_cos();
    let vel = Vec3::new(speed * cg * cy, speed * cg * sy, speed * sg);

    next.pos = state.pos + (vel + noise.wind) * dt;
    next.vel = vel;
    next.attitude = Vec3::new(roll, gamma, yaw);
    next.rates = Vec3::new(roll_rate, pitch_rate, yaw_rate);
    next.speed = speed;
    next.throttle = throttle;
    Ok(next)
}

/// Velocity-level quadcopter command.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadCommand {
    /// Desired world-frame velocity (m/s), clamped to the speed envelope.
    pub target_vel: Vec3,
    /// When set, overrides the vertical velocity with an altitude-hold
    /// toward this value.
    pub target_alt: Option<f64>,
    /// World-frame direction to point the nose (for aiming); when unset the
    /// nose follows the motion direction.
    pub aim: Option<Vec3>,
}

impl QuadCommand {
    pub fn hover() -> Self {
        QuadCommand::default()
    }
}

/// Advance a quadcopter one step of `dt` seconds.
pub fn step_quadcopter(
    state: &AgentState,
    command: &QuadCommand,
    dt: f64,
    noise: &StepNoise,
) -> Result<AgentState> {
    check_state(state, VehicleKind::Quadcopter, "step_quadcopter")?;

    let mut desired = command.target_vel;
    if let Some(alt) = command.target_alt {
        desired.z = (QUAD_ALT_GAIN * (alt - state.pos.z)).clamp(-QUAD_VZ_MAX, QUAD_VZ_MAX);
    }
    desired += Vec3::new(noise.control[0], noise.control[1], noise.control[2]) * QUAD_CMD_NOISE_SCALE;
    let desired = desired.clamp_norm(QUAD_SPEED_MAX);

    let vel = state.vel + (desired - state.vel) * (dt / QUAD_VEL_TAU);

    // Nose direction: aim if given, else motion direction when moving.
    let aim_dir = command
        .aim
        .and_then(|a| a.normalized())
        .or_else(|| (vel.horizontal().norm() > 0.5).then(|| vel.normalized()).flatten());
    let (yaw, pitch) = match aim_dir {
        Some(d) => {
            let want_yaw = d.y.atan2(d.x);
            let want_pitch = d.z.atan2(d.horizontal().norm()).clamp(-1.0, 1.0);
            let dyaw = wrap_angle(want_yaw - state.yaw()).clamp(-QUAD_YAW_RATE * dt, QUAD_YAW_RATE * dt);
            let dpitch = (want_pitch - state.pitch()).clamp(-QUAD_PITCH_RATE * dt, QUAD_PITCH_RATE * dt);
            (wrap_angle(state.yaw() + dyaw), state.pitch() + dpitch)
        }
        None => (state.yaw(), state.pitch()),
    };

    let mut next = state.clone();
    next.pos = state.pos + (vel + noise.wind) * dt;
    next.vel = vel;
    let attitude = Vec3::new(0.0, pitch, yaw);
    next.rates = Vec3::new(
        0.0,
        (pitch - state.pitch()) / dt,
        wrap_angle(yaw - state.yaw()) / dt,
    );
    next.attitude = attitude;
    next.speed = vel.norm();
    next.throttle = 0.5;
    Ok(next)
}

/// Spawn-time state template for either vehicle kind.
pub(crate) fn rest_state(
    id: crate::sim::AgentId,
    team: crate::sim::TeamId,
    kind: VehicleKind,
    pos: Vec3,
    yaw: f64,
) -> AgentState {
    match kind {
        VehicleKind::FixedWing => {
            let vel = Vec3::new(FW_TRIM_SPEED * yaw.cos(), FW_TRIM_SPEED * yaw.sin(), 0.0);
            AgentState {
                id,
                team,
                kind,
                alive: true,
                pos,
                vel,
                attitude: Vec3::new(0.0, 0.0, yaw),
                rates: Vec3::ZERO,
                speed: FW_TRIM_SPEED,
                throttle: 0.5,
            }
        }
        VehicleKind::Quadcopter => AgentState {
            id,
            team,
            kind,
            alive: true,
            pos,
            vel: Vec3::ZERO,
            attitude: Vec3::new(0.0, 0.0, yaw),
            rates: Vec3::ZERO,
            speed: 0.0,
            throttle: 0.5,
        },
    }
}
