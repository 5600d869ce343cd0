//! Actuator faults, applied after the controller.

use crate::dynamics::{DoubleTrack, Model};
use crate::params::Wheel;
use crate::scenario::{FaultEvent, FaultKind};
use crate::sensitivity::SensitivityMatrix;
use crate::sim::integrator::Driver;
use crate::state::{sidx, ControlInput};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaultActivation {
    /// First step at which the fault acted [s].
    pub time: f64,
    pub wheel: Wheel,
    pub kind: FaultKind,
    /// For a locked wheel: torque that holds it at zero spin at activation
    /// [N·m].
    pub implied_torque: Option<f64>,
}

/// Overrides the nominal input with every fault active at `t`.
pub fn apply_faults(u: &ControlInput, faults: &[FaultEvent], t: f64) -> ControlInput {
    let mut out = *u;
    for f in faults.iter().filter(|f| f.is_active(t)) {
        let i = f.wheel.index();
        match f.kind {
            FaultKind::LockedSteering { angle } => out.delta[i] = angle,
            FaultKind::FreeRunning => out.torque[i] = 0.0,
            FaultKind::LockedWheel => {}
        }
    }
    out
}

/// Wraps a double-track driver with fault injection.
///
/// A locked wheel is a state projection: at the start of every step its spin
/// speed and the matching sensitivity row are set to zero.
pub struct FaultInjector<D> {
    inner: D,
    faults: Vec<FaultEvent>,
    params: Vec<f64>,
    log: Vec<FaultActivation>,
    logged: Vec<bool>,
}

impl<D> FaultInjector<D> {
    pub fn new(inner: D, faults: Vec<FaultEvent>, params: Vec<f64>) -> Self {
        let logged = vec![false; faults.len()];
        Self { inner, faults, params, log: Vec::new(), logged }
    }

    pub fn into_inner(self) -> D {
        self.inner
    }
}

impl<D: Driver<DoubleTrack>> Driver<DoubleTrack> for FaultInjector<D> {
    fn input(&mut self, t: f64, x: &[f64]) -> ControlInput {
        let nominal = self.inner.input(t, x);
        let u = apply_faults(&nominal, &self.faults, t);
        for (k, f) in self.faults.iter().enumerate() {
            if self.logged[k] || !f.is_active(t) {
                continue;
            }
            self.logged[k] = true;
            let implied_torque = match f.kind {
                FaultKind::LockedWheel => {
                    let i = f.wheel.index();
                    let mut dx = vec![0.0; x.len()];
                    DoubleTrack.rhs(x, &u, &self.params, &mut dx).ok().map(|_| {
                        let j_w = self.params[crate::params::idx::J_W + i];
                        u.torque[i] - j_w * dx[sidx::OMEGA + i]
                    })
                }
                _ => None,
            };
            self.log.push(FaultActivation { time: t, wheel: f.wheel, kind: f.kind, implied_torque });
        }
        u
    }

    fn project(&mut self, t: f64, x: &mut [f64], mut z: Option<&mut SensitivityMatrix>) {
        self.inner.project(t, x, z.as_deref_mut());
        for f in &self.faults {
            if f.kind == FaultKind::LockedWheel && f.is_active(t) {
                let row = sidx::OMEGA + f.wheel.index();
                x[row] = 0.0;
                if let Some(z) = z.as_deref_mut() {
                    z.row_mut(row).fill(0.0);
                }
            }
        }
    }

    fn fault_log(&self) -> Vec<FaultActivation> {
        let mut log = self.inner.fault_log();
        log.extend_from_slice(&self.log);
        log
    }
}
