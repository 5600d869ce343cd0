//! Declarative scenarios, fault events and the configuration file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Violation};
use crate::params::{ParamSet, Wheel};
use crate::state::{ActuatorLimits, ControlInput};

/// One sample of a reference motion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefSample {
    /// [s]
    pub t: f64,
    /// Speed [m/s].
    pub v: f64,
    /// Path curvature, positive to the left [1/m].
    pub kappa: f64,
    /// Longitudinal acceleration, `dv/dt` [m/s²].
    #[serde(default)]
    pub a_x: f64,
    /// Path heading [rad].
    #[serde(default)]
    pub heading: f64,
}

/// Time-indexed reference, linearly interpolated and held at both ends.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub samples: Vec<RefSample>,
}

impl Reference {
    pub fn constant(v: f64, kappa: f64) -> Self {
        Self {
            samples: vec![RefSample { t: 0.0, v, kappa, a_x: 0.0, heading: 0.0 }],
        }
    }

    pub fn at(&self, t: f64) -> RefSample {
        let s = &self.samples;
        if s.is_empty() {
            return RefSample { t, ..RefSample::default() };
        }
        if t <= s[0].t {
            return RefSample { t, ..s[0] };
        }
        let last = s[s.len() - 1];
        if t >= last.t {
            return RefSample { t, ..last };
        }
        let i = s.partition_point(|r| r.t <= t);
        let (a, b) = (s[i - 1], s[i]);
        let w = (t - a.t) / (b.t - a.t);
        let lerp = |p: f64, q: f64| p + w * (q - p);
        RefSample {
            t,
            v: lerp(a.v, b.v),
            kappa: lerp(a.kappa, b.kappa),
            a_x: lerp(a.a_x, b.a_x),
            heading: lerp(a.heading, b.heading),
        }
    }

    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }
}

/// Explicit input sample, held until the next one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSample {
    pub t: f64,
    pub delta: [f64; 4],
    #[serde(rename = "M")]
    pub torque: [f64; 4],
}

impl InputSample {
    pub fn input(&self) -> ControlInput {
        ControlInput {
            delta: self.delta,
            torque: self.torque,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScenarioKind {
    /// Constant speed on a circle of the given radius (positive turns left).
    Circle { radius: f64, speed: f64 },
    /// Axle steering step at `step_time` with speed held by the controller.
    SteeringStep {
        speed: f64,
        step_time: f64,
        delta_f: f64,
        #[serde(default)]
        delta_r: f64,
    },
    /// Wheel-level inputs replayed open loop.
    TrajectoryReplay {
        speed: f64,
        samples: Vec<InputSample>,
    },
    /// Closed-loop tracking of a synthetic operating-domain trajectory.
    OddSynthetic {
        seed: u64,
        #[serde(default = "default_a_limit")]
        a_limit: f64,
    },
}

fn default_a_limit() -> f64 {
    3.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FaultKind {
    /// Steering actuator stuck at `angle` [rad].
    LockedSteering { angle: f64 },
    /// No drive torque; the wheel spins freely.
    FreeRunning,
    /// Wheel blocked: spin speed held at zero.
    LockedWheel,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultEvent {
    /// Activation time [s].
    pub time: f64,
    pub wheel: Wheel,
    pub kind: FaultKind,
}

impl FaultEvent {
    pub fn is_active(&self, t: f64) -> bool {
        t >= self.time
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// [s]
    pub duration: f64,
    /// Integrator step [s].
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_true")]
    pub sensitivity: bool,
    pub kind: ScenarioKind,
    #[serde(default)]
    pub faults: Vec<FaultEvent>,
}

fn default_step() -> f64 {
    1e-3
}

fn default_true() -> bool {
    true
}

impl Scenario {
    pub fn new(duration: f64, kind: ScenarioKind) -> Self {
        Self {
            duration,
            step: default_step(),
            sensitivity: true,
            kind,
            faults: Vec::new(),
        }
    }

    pub fn with_fault(mut self, f: FaultEvent) -> Self {
        self.faults.push(f);
        self
    }

    /// Speed the vehicle starts at.
    pub fn initial_speed(&self) -> f64 {
        match &self.kind {
            ScenarioKind::Circle { speed, .. }
            | ScenarioKind::SteeringStep { speed, .. }
            | ScenarioKind::TrajectoryReplay { speed, .. } => *speed,
            ScenarioKind::OddSynthetic { .. } => f64::NAN,
        }
    }

    pub fn violations(&self, limits: &ActuatorLimits) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.duration.is_finite() && self.duration > 0.0) {
            out.push(Violation::new("duration", self.duration, "must be strictly positive"));
        }
        if !(self.step > 0.0 && self.step <= 0.01) {
            out.push(Violation::new("step", self.step, "out of (0, 0.01]"));
        }
        match &self.kind {
            ScenarioKind::Circle { radius, speed } => {
                if !(radius.is_finite() && *radius != 0.0) {
                    out.push(Violation::new("radius", *radius, "must be finite and non-zero"));
                }
                if !(*speed > 0.0) {
                    out.push(Violation::new("speed", *speed, "must be strictly positive"));
                }
            }
            ScenarioKind::SteeringStep { speed, step_time, delta_f, delta_r } => {
                if !(*speed > 0.0) {
                    out.push(Violation::new("speed", *speed, "must be strictly positive"));
                }
                if !(*step_time >= 0.0) {
                    out.push(Violation::new("step_time", *step_time, "must be non-negative"));
                }
                for (name, d) in [("delta_f", delta_f), ("delta_r", delta_r)] {
                    if !(d.abs() <= limits.delta_max) {
                        out.push(Violation::new(name, *d, "outside actuator range"));
                    }
                }
            }
            ScenarioKind::TrajectoryReplay { speed, samples } => {
                if !(*speed >= 0.0) {
                    out.push(Violation::new("speed", *speed, "must be non-negative"));
                }
                if samples.is_empty() {
                    out.push(Violation::new("samples", 0.0, "must not be empty"));
                }
                for w in samples.windows(2) {
                    if !(w[1].t > w[0].t) {
                        out.push(Violation::new("samples.t", w[1].t, "must be strictly increasing"));
                    }
                }
            }
            ScenarioKind::OddSynthetic { a_limit, .. } => {
                if !(*a_limit > 0.0) {
                    out.push(Violation::new("a_limit", *a_limit, "must be strictly positive"));
                }
            }
        }
        for f in &self.faults {
            if !(f.time >= 0.0 && f.time <= self.duration) {
                out.push(Violation::new("faults.time", f.time, "outside [0, duration]"));
            }
            if let FaultKind::LockedSteering { angle } = f.kind {
                if !(angle.abs() <= limits.delta_max) {
                    out.push(Violation::new("faults.angle", angle, "outside actuator range"));
                }
            }
        }
        out
    }

    pub fn validate(&self, limits: &ActuatorLimits) -> Result<(), Error> {
        let v = self.violations(limits);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidScenario(v))
        }
    }
}

/// Gains of the tracking controller.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerGains {
    /// Speed error to acceleration [1/s].
    pub k_p_speed: f64,
    /// Integrated speed error to acceleration [1/s²].
    pub k_i_speed: f64,
    /// Yaw-rate error to front steering angle [s].
    pub k_yaw: f64,
    /// Rear axle angle as a fraction of the front axle angle.
    pub rear_ratio: f64,
}

impl Default for ControllerGains {
    fn default() -> Self {
        Self {
            k_p_speed: 1.0,
            k_i_speed: 0.2,
            k_yaw: 1.0,
            rear_ratio: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    #[default]
    DoubleTrack,
    SingleTrack,
}

/// Contents of a configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub model: ModelKind,
    /// Output every n-th integrator step.
    #[serde(default = "default_decimation")]
    pub decimation: usize,
    #[serde(default = "ParamSet::reference")]
    pub params: ParamSet,
    #[serde(default)]
    pub controller: ControllerGains,
    #[serde(default)]
    pub limits: ActuatorLimits,
    pub scenario: Scenario,
}

fn default_decimation() -> usize {
    10
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Every violation of parameters and scenario, in one report.
    pub fn violations(&self) -> Vec<Violation> {
        let mut v = self.params.violations();
        v.extend(self.scenario.violations(&self.limits));
        if self.decimation == 0 {
            v.push(Violation::new("decimation", 0.0, "must be at least 1"));
        }
        v
    }

    pub fn validate(&self) -> Result<(), Error> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else if self.params.violations().is_empty() {
            Err(Error::InvalidScenario(v))
        } else {
            Err(Error::InvalidParams(v))
        }
    }
}
