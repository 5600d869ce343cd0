use crate::dynamics::{st_params_from_dt, DoubleTrack, Model, SingleTrack};
use crate::error::{Error, Violation};
use crate::odd::synth_odd_trajectory;
use crate::params::ParamSet;
use crate::scenario::{Config, ControllerGains, ModelKind, Reference, Scenario, ScenarioKind};
use crate::sensitivity::steady_state_sensitivity_st;
use crate::sim::controller::{Replay, StTracker, Steering, Tracker};
use crate::sim::faults::FaultInjector;
use crate::sim::integrator::{integrate, IntegratorConfig};
use crate::sim::output::{SimOutput, SteadyState};
use crate::state::{ActuatorLimits, DtState, StState};

/// Everything a run needs besides the scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSetup {
    pub params: ParamSet,
    pub gains: ControllerGains,
    pub limits: ActuatorLimits,
    pub decimation: usize,
}

impl Default for RunSetup {
    fn default() -> Self {
        Self {
            params: ParamSet::reference(),
            gains: ControllerGains::default(),
            limits: ActuatorLimits::default(),
            decimation: 10,
        }
    }
}

impl From<&Config> for RunSetup {
    fn from(c: &Config) -> Self {
        Self {
            params: c.params.clone(),
            gains: c.controller,
            limits: c.limits,
            decimation: c.decimation,
        }
    }
}

impl RunSetup {
    pub fn integrator(&self, s: &Scenario) -> IntegratorConfig {
        IntegratorConfig {
            step: s.step,
            decimation: self.decimation,
            sensitivity: s.sensitivity,
        }
    }
}

/// Reference motion and steering mode of a scenario, plus its start speed.
fn reference_of(s: &Scenario) -> Result<Option<(Reference, Steering, f64)>, Error> {
    Ok(match &s.kind {
        ScenarioKind::Circle { radius, speed } => {
            Some((Reference::constant(*speed, 1.0 / radius), Steering::Track, *speed))
        }
        ScenarioKind::SteeringStep { speed, step_time, delta_f, delta_r } => Some((
            Reference::constant(*speed, 0.0),
            Steering::Step { time: *step_time, delta_f: *delta_f, delta_r: *delta_r },
            *speed,
        )),
        ScenarioKind::OddSynthetic { seed, a_limit } => {
            let r = synth_odd_trajectory(*seed, s.duration, *a_limit)?;
            let v0 = r.at(0.0).v;
            Some((r, Steering::Track, v0))
        }
        ScenarioKind::TrajectoryReplay { .. } => None,
    })
}

/// Runs one scenario on the selected model.
pub fn run_scenario(kind: ModelKind, scenario: &Scenario, setup: &RunSetup) -> Result<SimOutput, Error> {
    let bad = setup.params.violations();
    if !bad.is_empty() {
        return Err(Error::InvalidParams(bad));
    }
    scenario.validate(&setup.limits)?;
    let cfg = setup.integrator(scenario);
    match kind {
        ModelKind::DoubleTrack => run_dt(scenario, setup, &cfg),
        ModelKind::SingleTrack => run_st(scenario, setup, &cfg),
    }
}

fn run_dt(s: &Scenario, setup: &RunSetup, cfg: &IntegratorConfig) -> Result<SimOutput, Error> {
    let p = &setup.params;
    let c = p.flatten();
    let mut out = match reference_of(s)? {
        Some((reference, steering, v0)) => {
            let x0 = DtState::rolling(v0, &p.r).to_array();
            let tracker = Tracker::new(reference, setup.gains, setup.limits, p.clone(), cfg.step).with_steering(steering);
            let mut d = FaultInjector::new(tracker, s.faults.clone(), c.clone());
            integrate(&DoubleTrack, &c, &x0, &mut d, s.duration, cfg)?
        }
        None => {
            let ScenarioKind::TrajectoryReplay { speed, samples } = &s.kind else {
                unreachable!("only replay scenarios lack a reference")
            };
            let x0 = DtState::rolling(*speed, &p.r).to_array();
            let replay = Replay::new(
                samples.iter().map(|r| r.t).collect(),
                samples.iter().map(|r| r.input().saturate(&setup.limits)).collect(),
            );
            let mut d = FaultInjector::new(replay, s.faults.clone(), c.clone());
            integrate(&DoubleTrack, &c, &x0, &mut d, s.duration, cfg)?
        }
    };
    if matches!(s.kind, ScenarioKind::Circle { .. }) {
        out.steady_state = Some(SteadyState {
            x: out.states.last().cloned().unwrap_or_default(),
            z: out.sensitivities.as_ref().and_then(|z| z.last().cloned()),
        });
    }
    Ok(out)
}

fn run_st(s: &Scenario, setup: &RunSetup, cfg: &IntegratorConfig) -> Result<SimOutput, Error> {
    if !s.faults.is_empty() {
        return Err(Error::InvalidScenario(vec![Violation::new(
            "faults",
            s.faults.len() as f64,
            "need the double-track model",
        )]));
    }
    let x0 = StState::default().to_array();
    let mut out = match reference_of(s)? {
        Some((reference, steering, v0)) => {
            let sp = st_params_from_dt(&setup.params, v0).validate()?;
            let mut d = StTracker::new(reference, setup.gains, setup.limits, sp).with_steering(steering);
            integrate(&SingleTrack, &sp.flatten(), &x0, &mut d, s.duration, cfg)?
        }
        None => {
            let ScenarioKind::TrajectoryReplay { speed, samples } = &s.kind else {
                unreachable!("only replay scenarios lack a reference")
            };
            let sp = st_params_from_dt(&setup.params, *speed).validate()?;
            let inputs = samples
                .iter()
                .map(|r| {
                    let (f, rr) = crate::ackermann::ackermann_convert(&r.input().saturate(&setup.limits).delta, &setup.params);
                    crate::state::StInput::steer(f, rr)
                })
                .collect();
            let mut d = Replay::new(samples.iter().map(|r| r.t).collect(), inputs);
            integrate(&SingleTrack, &sp.flatten(), &x0, &mut d, s.duration, cfg)?
        }
    };
    if matches!(s.kind, ScenarioKind::Circle { .. }) {
        let sp = crate::params::StParams::unflatten(&out.params)?;
        let last = out.applied_inputs.last().ok_or(Error::Empty)?;
        let u = SingleTrack.input_from_values(last);
        let (x, z) = steady_state_sensitivity_st(&sp, &u)?;
        out.steady_state = Some(SteadyState {
            x: x.as_slice().to_vec(),
            z: cfg.sensitivity.then_some(z),
        });
    }
    Ok(out)
}

/// Runs the scenario of a configuration file.
pub fn run_config(c: &Config) -> Result<SimOutput, Error> {
    c.validate()?;
    run_scenario(c.model, &c.scenario, &RunSetup::from(c))
}
