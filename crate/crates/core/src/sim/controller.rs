//! Simple tracking controller: PI on speed, Ackermann feedforward plus
//! yaw-rate feedback on steering.

use crate::ackermann::ackermann_wheels;
use crate::dynamics::{DoubleTrack, SingleTrack};
use crate::params::{ParamSet, StParams};
use crate::scenario::{ControllerGains, RefSample, Reference};
use crate::sim::integrator::Driver;
use crate::state::{ActuatorLimits, ControlInput, DtState, StInput};

/// How the axle steering angles are produced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Steering {
    /// Follow the reference curvature.
    Track,
    /// Open-loop axle angles switched on at `time`.
    Step { time: f64, delta_f: f64, delta_r: f64 },
}

impl Steering {
    fn axle(&self, r: &RefSample, psi_dot: f64, v: f64, wheelbase: f64, g: &ControllerGains) -> (f64, f64) {
        match *self {
            Steering::Track => {
                let f = (wheelbase * r.kappa).atan() + g.k_yaw * (v * r.kappa - psi_dot);
                (f, g.rear_ratio * f)
            }
            Steering::Step { time, delta_f, delta_r } => {
                if r.t >= time {
                    (delta_f, delta_r)
                } else {
                    (0.0, 0.0)
                }
            }
        }
    }
}

/// One evaluation of the double-track controller.
///
/// `speed_integral` is the integrated speed error `∫(v_ref − v_x) dt`.
/// Longitudinal: `a = a_ref + k_p e + k_i ∫e`, split into four equal wheel
/// forces `m a / 4`. Lateral: `δ_f = atan(L κ) + k_yaw (v_x κ − ψ̇)`,
/// `δ_r = rear_ratio · δ_f`, spread over the wheels by Ackermann geometry.
pub fn tracking_controller(
    r: &RefSample,
    x: &DtState,
    speed_integral: f64,
    gains: &ControllerGains,
    limits: &ActuatorLimits,
    p: &ParamSet,
) -> ControlInput {
    control(r, x, speed_integral, gains, limits, p, Steering::Track)
}

fn control(
    r: &RefSample,
    x: &DtState,
    speed_integral: f64,
    gains: &ControllerGains,
    limits: &ActuatorLimits,
    p: &ParamSet,
    steering: Steering,
) -> ControlInput {
    let e = r.v - x.v_x;
    let a = r.a_x + gains.k_p_speed * e + gains.k_i_speed * speed_integral;
    let force = 0.25 * p.m * a;
    let torque = [force * p.r[0], force * p.r[1], force * p.r[2], force * p.r[3]];
    let (df, dr) = steering.axle(r, x.psi_dot, x.v_x, p.wheelbase(), gains);
    let (df, dr) = (df.clamp(-limits.delta_max, limits.delta_max), dr.clamp(-limits.delta_max, limits.delta_max));
    ControlInput { delta: ackermann_wheels(df, dr, p), torque }.saturate(limits)
}

/// Double-track driver following a reference.
#[derive(Clone, Debug)]
pub struct Tracker {
    pub reference: Reference,
    pub gains: ControllerGains,
    pub limits: ActuatorLimits,
    pub params: ParamSet,
    pub steering: Steering,
    step: f64,
    integral: f64,
}

impl Tracker {
    pub fn new(reference: Reference, gains: ControllerGains, limits: ActuatorLimits, params: ParamSet, step: f64) -> Self {
        Self { reference, gains, limits, params, steering: Steering::Track, step, integral: 0.0 }
    }

    pub fn with_steering(mut self, s: Steering) -> Self {
        self.steering = s;
        self
    }
}

impl Driver<DoubleTrack> for Tracker {
    fn input(&mut self, t: f64, x: &[f64]) -> ControlInput {
        let r = self.reference.at(t);
        let s = DtState::from_slice(x);
        let u = control(&r, &s, self.integral, &self.gains, &self.limits, &self.params, self.steering);
        self.integral += (r.v - s.v_x) * self.step;
        u
    }
}

/// Single-track counterpart of [`Tracker`]: speed follows the reference
/// exactly through `speed_offset`, steering as for the double-track model.
#[derive(Clone, Debug)]
pub struct StTracker {
    pub reference: Reference,
    pub gains: ControllerGains,
    pub limits: ActuatorLimits,
    pub params: StParams,
    pub steering: Steering,
}

impl StTracker {
    pub fn new(reference: Reference, gains: ControllerGains, limits: ActuatorLimits, params: StParams) -> Self {
        Self { reference, gains, limits, params, steering: Steering::Track }
    }

    pub fn with_steering(mut self, s: Steering) -> Self {
        self.steering = s;
        self
    }
}

impl Driver<SingleTrack> for StTracker {
    fn input(&mut self, t: f64, x: &[f64]) -> StInput {
        let r = self.reference.at(t);
        let l = self.params.l_f + self.params.l_r;
        let (df, dr) = self.steering.axle(&r, x[1], r.v, l, &self.gains);
        let lim = self.limits.delta_max;
        StInput {
            delta_f: df.clamp(-lim, lim),
            delta_r: dr.clamp(-lim, lim),
            speed_offset: r.v - self.params.v,
        }
    }
}

/// Zero-order-hold playback of recorded inputs.
#[derive(Clone, Debug)]
pub struct Replay<U> {
    times: Vec<f64>,
    inputs: Vec<U>,
}

impl<U: Copy> Replay<U> {
    /// `inputs[k]` applies from `times[k]` until the next sample.
    pub fn new(times: Vec<f64>, inputs: Vec<U>) -> Self {
        assert_eq!(times.len(), inputs.len(), "replay times and inputs differ in length");
        assert!(!inputs.is_empty(), "replay needs at least one input");
        Self { times, inputs }
    }

    /// One input per integrator step of size `h`.
    pub fn per_step(inputs: Vec<U>, h: f64) -> Self {
        let times = (0..inputs.len()).map(|k| k as f64 * h).collect();
        Self::new(times, inputs)
    }

    pub fn at(&self, t: f64) -> U {
        // Half a nanosecond of slack absorbs rounding in recomputed grids.
        let i = self.times.partition_point(|s| *s <= t + 5e-10);
        self.inputs[i.saturating_sub(1)]
    }
}

impl Driver<DoubleTrack> for Replay<ControlInput> {
    fn input(&mut self, t: f64, _: &[f64]) -> ControlInput {
        self.at(t)
    }
}

impl Driver<SingleTrack> for Replay<StInput> {
    fn input(&mut self, t: f64, _: &[f64]) -> StInput {
        self.at(t)
    }
}
