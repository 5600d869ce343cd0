//! Batch experiments: circle sweeps, fault injection, operating-domain runs.

use rayon::prelude::*;

use crate::ackermann::ackermann_convert;
use crate::dynamics::{st_params_from_dt, st_yaw_gain, SingleTrack};
use crate::error::{Error, Violation};
use crate::params::{ParamSet, Wheel};
use crate::scenario::{FaultEvent, FaultKind, ModelKind, Scenario, ScenarioKind};
use crate::sensitivity::{steady_state_sensitivity_st, SensitivityMatrix};
use crate::sim::controller::Replay;
use crate::sim::integrator::integrate;
use crate::sim::output::SimOutput;
use crate::sim::runner::{run_scenario, RunSetup};
use crate::state::StInput;

/// Default circle for [`circle_sweep`] [m]. Every speed it implies for
/// a_y ≥ 3 m/s² lies above the zero side-slip speed of the reference vehicle.
pub const SWEEP_RADIUS: f64 = 100.0;

/// Steady single-track cornering at one lateral acceleration.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleSweepRow {
    /// [m/s²]
    pub a_y: f64,
    /// [m/s]
    pub speed: f64,
    /// Front axle angle holding the circle [rad].
    pub delta_f: f64,
    /// `(β, ψ̇)`.
    pub x_ss: [f64; 2],
    /// 2×7 steady-state sensitivities, single-track parameter order.
    pub z_ss: SensitivityMatrix,
}

/// Steady-state sensitivities on a circle of fixed `radius`, with speed
/// chosen so that `v² / radius` hits each requested lateral acceleration.
pub fn circle_sweep(p: &ParamSet, radius: f64, a_y: &[f64]) -> Result<Vec<CircleSweepRow>, Error> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidScenario(vec![Violation::new("radius", radius, "must be strictly positive")]));
    }
    a_y.iter()
        .map(|&a| {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidScenario(vec![Violation::new("a_y", a, "must be strictly positive")]));
            }
            let speed = (a * radius).sqrt();
            let sp = st_params_from_dt(p, speed).validate()?;
            let delta_f = speed / radius / st_yaw_gain(&sp);
            let (x, z) = steady_state_sensitivity_st(&sp, &StInput::steer(delta_f, 0.0))?;
            Ok(CircleSweepRow { a_y: a, speed, delta_f, x_ss: [x[0], x[1]], z_ss: z })
        })
        .collect()
}

/// Locked front-left steering at 30° from t = 1 s.
pub fn locked_steering_fault() -> FaultEvent {
    FaultEvent {
        time: 1.0,
        wheel: Wheel::FrontLeft,
        kind: FaultKind::LockedSteering { angle: 30f64.to_radians() },
    }
}

/// Nominal drive for the fault experiment: near-straight lane keeping at
/// 10 m/s on a 5 km left-hand arc.
pub fn fault_reference_scenario() -> Scenario {
    Scenario::new(5.0, ScenarioKind::Circle { radius: 5000.0, speed: 10.0 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaultSweep {
    pub nominal: SimOutput,
    pub faulted: SimOutput,
}

/// Runs `nominal` (faults removed) and the same scenario with `faults` on the
/// double-track model.
pub fn fault_sweep(nominal: &Scenario, faults: &[FaultEvent], setup: &RunSetup) -> Result<FaultSweep, Error> {
    let clean = Scenario { faults: Vec::new(), ..nominal.clone() };
    let faulty = Scenario { faults: faults.to_vec(), ..nominal.clone() };
    let (a, b) = rayon::join(
        || run_scenario(ModelKind::DoubleTrack, &clean, setup),
        || run_scenario(ModelKind::DoubleTrack, &faulty, setup),
    );
    Ok(FaultSweep { nominal: a?, faulted: b? })
}

/// One operating-domain trajectory on both models.
#[derive(Clone, Debug, PartialEq)]
pub struct OddRun {
    pub seed: u64,
    /// Closed-loop double-track run.
    pub dt: SimOutput,
    /// Single-track replay of the double-track axle angles and speed.
    pub st: SimOutput,
}

/// Replays a double-track run on the single-track model: axle angles from
/// the Ackermann inverse, speed through `speed_offset`, both held per output
/// sample.
pub fn single_track_replay(dt: &SimOutput, p: &ParamSet, sensitivity: bool) -> Result<SimOutput, Error> {
    if dt.model != ModelKind::DoubleTrack || dt.is_empty() {
        return Err(Error::Mismatch("single-track replay needs a double-track run".into()));
    }
    let v0 = dt.states[0][0];
    let sp = st_params_from_dt(p, v0).validate()?;
    let inputs: Vec<StInput> = dt
        .inputs
        .iter()
        .zip(&dt.states)
        .map(|(u, x)| {
            let (f, r) = ackermann_convert(&[u[0], u[1], u[2], u[3]], p);
            StInput { delta_f: f, delta_r: r, speed_offset: x[0] - v0 }
        })
        .collect();
    let mut d = Replay::new(dt.time.clone(), inputs);
    let duration = *dt.time.last().unwrap_or(&0.0);
    let decimation = if dt.time.len() > 1 { ((dt.time[1] - dt.time[0]) / dt.step).round() as usize } else { 1 };
    let cfg = crate::sim::integrator::IntegratorConfig { step: dt.step, decimation: decimation.max(1), sensitivity };
    integrate(&SingleTrack, &sp.flatten(), &[0.0, 0.0], &mut d, duration, &cfg)
}

/// `n` synthetic trajectories with seeds `seed, seed + 1, …`, run in
/// parallel and returned in seed order.
pub fn odd_batch(n: usize, seed: u64, duration: f64, a_limit: f64, setup: &RunSetup) -> Result<Vec<OddRun>, Error> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            let scenario = Scenario::new(duration, ScenarioKind::OddSynthetic { seed: s, a_limit });
            let dt = run_scenario(ModelKind::DoubleTrack, &scenario, setup)?;
            let st = single_track_replay(&dt, &setup.params, scenario.sensitivity)?;
            Ok(OddRun { seed: s, dt, st })
        })
        .collect()
}
