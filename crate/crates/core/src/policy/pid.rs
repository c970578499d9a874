//! PID low-level control: heading, altitude, and speed loops mapped onto
//! thrust, aileron, elevator, and rudder.
//!
//! * heading loop: error = bearing of the (agent-local) target, drives the
//!   aileron plus a coordinated rudder fraction;
//! * altitude loop: error = vertical target component, drives the elevator;
//! * speed loop: error = target airspeed minus current, drives thrust about
//!   the trim setting.
//!
//! Integrator and derivative memory live in the explicit [`PidState`] value
//! that callers pass in and get back.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::network::HeadingTarget;
use crate::sim::AgentState;

/// Normalized actuator commands: thrust in [0, 1], the rest in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlCommand {
    pub thrust: f64,
    pub aileron: f64,
    pub elevator: f64,
    pub rudder: f64,
}

impl ControlCommand {
    pub fn clamped(self) -> ControlCommand {
        ControlCommand {
            thrust: self.thrust.clamp(0.0, 1.0),
            aileron: self.aileron.clamp(-1.0, 1.0),
            elevator: self.elevator.clamp(-1.0, 1.0),
            rudder: self.rudder.clamp(-1.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidChannel {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Absolute bound on the integrator.
    pub i_limit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PidGains {
    pub heading: PidChannel,
    pub altitude: PidChannel,
    pub speed: PidChannel,
    /// Airspeed setpoint (m/s).
    pub target_speed: f64,
    /// Thrust at zero speed error.
    pub trim_thrust: f64,
    /// Rudder as a fraction of the heading-loop output.
    pub rudder_ratio: f64,
}

impl Default for PidGains {
    fn default() -> Self {
        PidGains {
            heading: PidChannel { kp: 1.5, ki: 0.0, kd: 0.4, i_limit: 1.0 },
            altitude: PidChannel { kp: 0.05, ki: 0.0, kd: 0.12, i_limit: 10.0 },
            speed: PidChannel { kp: 0.08, ki: 0.01, kd: 0.0, i_limit: 5.0 },
            target_speed: 30.0,
            trim_thrust: 0.5,
            rudder_ratio: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct ChannelState {
    integral: f64,
    prev_error: Option<f64>,
}

impl ChannelState {
    fn step(&mut self, gains: &PidChannel, error: f64, dt: f64) -> f64 {
        self.integral = (self.integral + error * dt).clamp(-gains.i_limit, gains.i_limit);
        let derivative = match self.prev_error {
            Some(prev) => (error - prev) / dt,
            None => 0.0,
        };
        self.prev_error = Some(error);
        gains.kp * error + gains.ki * self.integral + gains.kd * derivative
    }
}

/// Controller memory for one agent, carried across steps by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    heading: ChannelState,
    altitude: ChannelState,
    speed: ChannelState,
}

/// One control step toward an agent-local heading target.
pub fn pid_control(
    target: &HeadingTarget,
    agent: &AgentState,
    state: &PidState,
    gains: &PidGains,
    dt: f64,
) -> Result<(ControlCommand, PidState)> {
    if !(dt > 0.0) {
        return Err(Error::invalid_argument("dt must be positive"));
    }
    let mut next = *state;

    // Bearing of the local target; a (near-)zero horizontal target means
    // "keep flying straight".
    let heading_error = if target.x.hypot(target.y) < 1e-9 {
        0.0
    } else {
        target.y.atan2(target.x)
    };
    let heading_out = next.heading.step(&gains.heading, heading_error, dt);

    let altitude_out = next.altitude.step(&gains.altitude, target.z, dt);

    let speed_error = gains.target_speed - agent.speed;
    let speed_out = next.speed.step(&gains.speed, speed_error, dt);

    let cmd = ControlCommand {
        thrust: gains.trim_thrust + speed_out,
        aileron: heading_out,
        elevator: altitude_out,
        rudder: gains.rudder_ratio * heading_out,
    }
    .clamped();
    Ok((cmd, next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{AgentId, VehicleKind};
    use crate::vec3::Vec3;

    fn cruising_agent() -> AgentState {
        AgentState {
            id: AgentId(0),
            team: 0,
            kind: VehicleKind::FixedWing,
            alive: true,
            pos: Vec3::new(0.0, 0.0, 100.0),
            vel: Vec3::new(30.0, 0.0, 0.0),
            attitude: Vec3::ZERO,
            rates: Vec3::ZERO,
            speed: 30.0,
            throttle: 0.5,
        }
    }

    #[test]
    fn zero_error_is_a_fixed_point() {
        let gains = PidGains::default();
        let target = HeadingTarget { x: 0.0, y: 0.0, z: 0.0 };
        let (cmd, _) = pid_control(&target, &cruising_agent(), &PidState::default(), &gains, 0.1).unwrap();
        assert_eq!(cmd.aileron, 0.0);
        assert_eq!(cmd.elevator, 0.0);
        assert_eq!(cmd.rudder, 0.0);
        assert_eq!(cmd.thrust, gains.trim_thrust);
    }

    #[test]
    fn pure_proportional_heading() {
        let mut gains = PidGains::default();
        gains.heading = PidChannel { kp: 0.7, ki: 0.0, kd: 0.0, i_limit: 1.0 };
        // Target 45 degrees to the left.
        let target = HeadingTarget { x: 100.0, y: 100.0, z: 0.0 };
        let (cmd, _) = pid_control(&target, &cruising_agent(), &PidState::default(), &gains, 0.1).unwrap();
        let want = (0.7 * std::f64::consts::FRAC_PI_4).clamp(-1.0, 1.0);
        assert!((cmd.aileron - want).abs() < 1e-12);
    }

    #[test]
    fn outputs_respect_bounds_for_huge_errors() {
        let gains = PidGains::default();
        let target = HeadingTarget { x: -1e6, y: 1e6, z: 1e6 };
        let (cmd, _) = pid_control(&target, &cruising_agent(), &PidState::default(), &gains, 0.1).unwrap();
        assert!(cmd.aileron.abs() <= 1.0);
        assert!(cmd.elevator.abs() <= 1.0);
        assert!(cmd.rudder.abs() <= 1.0);
        assert!((0.0..=1.0).contains(&cmd.thrust));
    }

    #[test]
    fn integrator_is_clamped() {
        let mut gains = PidGains::default();
        gains.speed = PidChannel { kp: 0.0, ki: 1.0, kd: 0.0, i_limit: 0.2 };
        let mut agent = cruising_agent();
        agent.speed = 0.0; // constant 30 m/s error
        let mut state = PidState::default();
        for _ in 0..100 {
            let (_, s) = pid_control(&HeadingTarget { x: 0.0, y: 0.0, z: 0.0 }, &agent, &state, &gains, 0.1).unwrap();
            state = s;
        }
        let (cmd, _) = pid_control(&HeadingTarget { x: 0.0, y: 0.0, z: 0.0 }, &agent, &state, &gains, 0.1).unwrap();
        assert!((cmd.thrust - (gains.trim_thrust + 0.2)).abs() < 1e-9);
    }

    #[test]
    fn rejects_nonpositive_dt() {
        let gains = PidGains::default();
        let target = HeadingTarget { x: 0.0, y: 0.0, z: 0.0 };
        assert!(pid_control(&target, &cruising_agent(), &PidState::default(), &gains, 0.0).is_err());
    }
}
