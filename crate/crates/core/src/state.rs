//! State and input vectors of both models.

use serde::{Deserialize, Serialize};

use crate::params::Wheel;

pub const DT_STATE_COUNT: usize = 13;

pub const DT_STATE_NAMES: [&str; DT_STATE_COUNT] = [
    "v_x",
    "v_y",
    "psi_dot",
    "z_s",
    "z_s_dot",
    "phi",
    "phi_dot",
    "theta",
    "theta_dot",
    "omega_fl",
    "omega_fr",
    "omega_rl",
    "omega_rr",
];

/// Row offsets of the double-track state vector.
pub mod sidx {
    pub const V_X: usize = 0;
    pub const V_Y: usize = 1;
    pub const PSI_DOT: usize = 2;
    pub const Z_S: usize = 3;
    pub const Z_S_DOT: usize = 4;
    pub const PHI: usize = 5;
    pub const PHI_DOT: usize = 6;
    pub const THETA: usize = 7;
    pub const THETA_DOT: usize = 8;
    pub const OMEGA: usize = 9;
}

/// Double-track state: body velocities, yaw rate, lift/roll/pitch positions
/// and rates, wheel spin speeds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DtState {
    pub v_x: f64,
    pub v_y: f64,
    pub psi_dot: f64,
    pub z_s: f64,
    pub z_s_dot: f64,
    pub phi: f64,
    pub phi_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
    pub omega: [f64; 4],
}

impl DtState {
    /// Straight-line motion at `v_x` with free-rolling wheels.
    pub fn rolling(v_x: f64, radii: &[f64; 4]) -> Self {
        Self {
            v_x,
            omega: [
                v_x / radii[0],
                v_x / radii[1],
                v_x / radii[2],
                v_x / radii[3],
            ],
            ..Self::default()
        }
    }

    pub fn to_array(&self) -> [f64; DT_STATE_COUNT] {
        [
            self.v_x,
            self.v_y,
            self.psi_dot,
            self.z_s,
            self.z_s_dot,
            self.phi,
            self.phi_dot,
            self.theta,
            self.theta_dot,
            self.omega[0],
            self.omega[1],
            self.omega[2],
            self.omega[3],
        ]
    }

    pub fn from_slice(x: &[f64]) -> Self {
        Self {
            v_x: x[0],
            v_y: x[1],
            psi_dot: x[2],
            z_s: x[3],
            z_s_dot: x[4],
            phi: x[5],
            phi_dot: x[6],
            theta: x[7],
            theta_dot: x[8],
            omega: [x[9], x[10], x[11], x[12]],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

pub const ST_STATE_COUNT: usize = 2;
pub const ST_STATE_NAMES: [&str; ST_STATE_COUNT] = ["beta", "psi_dot"];

/// Single-track state: side-slip angle and yaw rate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StState {
    pub beta: f64,
    pub psi_dot: f64,
}

impl StState {
    pub fn to_array(&self) -> [f64; 2] {
        [self.beta, self.psi_dot]
    }

    pub fn from_slice(x: &[f64]) -> Self {
        Self {
            beta: x[0],
            psi_dot: x[1],
        }
    }
}

pub const DT_INPUT_NAMES: [&str; 8] = [
    "delta_fl", "delta_fr", "delta_rl", "delta_rr", "M_fl", "M_fr", "M_rl", "M_rr",
];

/// Wheel steering angles [rad] and drive torques [N·m], wheel order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlInput {
    pub delta: [f64; 4],
    #[serde(rename = "M")]
    pub torque: [f64; 4],
}

impl ControlInput {
    pub fn to_array(&self) -> [f64; 8] {
        let mut a = [0.0; 8];
        a[..4].copy_from_slice(&self.delta);
        a[4..].copy_from_slice(&self.torque);
        a
    }

    pub fn from_slice(u: &[f64]) -> Self {
        Self {
            delta: [u[0], u[1], u[2], u[3]],
            torque: [u[4], u[5], u[6], u[7]],
        }
    }

    pub fn steer(&self, w: Wheel) -> f64 {
        self.delta[w.index()]
    }

    /// Clamps every steering angle to `±delta_max` and every torque to
    /// `±torque_max`.
    pub fn saturate(mut self, limits: &ActuatorLimits) -> Self {
        for d in self.delta.iter_mut() {
            *d = d.clamp(-limits.delta_max, limits.delta_max);
        }
        for m in self.torque.iter_mut() {
            *m = m.clamp(-limits.torque_max, limits.torque_max);
        }
        self
    }
}

pub const ST_INPUT_NAMES: [&str; 3] = ["delta_f", "delta_r", "speed_offset"];

/// Axle steering angles of the single-track model. `speed_offset` schedules
/// the speed at which the linear model is evaluated (`v + speed_offset`); it
/// is zero for constant-speed use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StInput {
    pub delta_f: f64,
    pub delta_r: f64,
    #[serde(default)]
    pub speed_offset: f64,
}

impl StInput {
    pub fn steer(delta_f: f64, delta_r: f64) -> Self {
        Self {
            delta_f,
            delta_r,
            speed_offset: 0.0,
        }
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.delta_f, self.delta_r, self.speed_offset]
    }
}

/// Actuator ranges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorLimits {
    /// [rad]
    pub delta_max: f64,
    /// [N·m]
    pub torque_max: f64,
}

impl Default for ActuatorLimits {
    fn default() -> Self {
        Self {
            delta_max: 0.6,
            torque_max: 2000.0,
        }
    }
}
