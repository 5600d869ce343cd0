//! Fixed-step RK4 over the model state, the global pose and, optionally, the
//! sensitivity matrix.
//!
//! Inputs are held constant over each step (zero-order hold): the driver is
//! queried once at the start of the step and all four stages see the same
//! input. Integrating `Ż = f_c + J Z` with the same RK4 stages as the state
//! makes `Z` the exact derivative of the discrete state map, so a central
//! difference of two runs converges to it.

use nalgebra::DMatrix;

use crate::dynamics::Model;
use crate::error::Error;
use crate::sensitivity::{linearize, SensitivityMatrix};
use crate::sim::faults::FaultActivation;
use crate::sim::output::SimOutput;

/// Largest admissible step [s].
pub const MAX_STEP: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    /// Step `h` [s].
    pub step: f64,
    /// Record every n-th step.
    pub decimation: usize,
    pub sensitivity: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            decimation: 1,
            sensitivity: true,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let mut v = Vec::new();
        if !(self.step > 0.0 && self.step <= MAX_STEP) {
            v.push(crate::error::Violation::new("step", self.step, "out of (0, 0.01]"));
        }
        if self.decimation == 0 {
            v.push(crate::error::Violation::new("decimation", 0.0, "must be at least 1"));
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidScenario(v))
        }
    }
}

/// Source of model inputs during a run.
pub trait Driver<M: Model> {
    /// Input held over the step starting at `t`.
    fn input(&mut self, t: f64, x: &[f64]) -> M::Input;

    /// State constraints applied at the start of every step, before
    /// [`Driver::input`]. Rows of `z` belonging to constrained states must be
    /// projected as well.
    fn project(&mut self, _t: f64, _x: &mut [f64], _z: Option<&mut SensitivityMatrix>) {}

    fn fault_log(&self) -> Vec<FaultActivation> {
        Vec::new()
    }
}

/// One classical RK4 step of `ẏ = f(t, y)`.
pub fn rk4_step<F>(mut f: F, t: f64, y: &[f64], h: f64) -> Result<Vec<f64>, Error>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), Error>,
{
    if !(h > 0.0) {
        return Err(Error::InvalidScenario(vec![crate::error::Violation::new(
            "step",
            h,
            "must be strictly positive",
        )]));
    }
    let n = y.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    f(t, y, &mut k1)?;
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    f(t + 0.5 * h, &tmp, &mut k2)?;
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    f(t + 0.5 * h, &tmp, &mut k3)?;
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    f(t + h, &tmp, &mut k4)?;

    let out: Vec<f64> = (0..n)
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::NonFinite("integrated state"))
    }
}

/// Runs `model` from `x0` for `duration` seconds.
pub fn integrate<M: Model, D: Driver<M>>(
    model: &M,
    c: &[f64],
    x0: &[f64],
    driver: &mut D,
    duration: f64,
    cfg: &IntegratorConfig,
) -> Result<SimOutput, Error> {
    cfg.validate()?;
    let (n, m) = (model.n_states(), model.n_params());
    if x0.len() != n {
        return Err(Error::Dimension { what: "initial state", expected: n, got: x0.len() });
    }
    if c.len() != m {
        return Err(Error::Dimension { what: "parameter vector", expected: m, got: c.len() });
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidScenario(vec![crate::error::Violation::new(
            "duration",
            duration,
            "must be strictly positive",
        )]));
    }
    let h = cfg.step;
    let steps = ((duration / h).round() as usize).max(1);

    let mut out = SimOutput::empty(model, c, h, cfg.sensitivity);
    let mut x = x0.to_vec();
    let mut pose = [0.0; 3];
    let mut z = cfg.sensitivity.then(|| DMatrix::<f64>::zeros(n, m));
    let mut dx = vec![0.0; n];

    for k in 0..=steps {
        let t = k as f64 * h;
        driver.project(t, &mut x, z.as_mut());
        let u = driver.input(t, &x);

        if k % cfg.decimation == 0 || k == steps {
            let lift = model.rhs(&x, &u, c, &mut dx)?;
            out.push_sample(t, &x, pose, model.input_values(&u), z.as_ref(), lift);
        }
        if k == steps {
            break;
        }
        out.applied_inputs.push(model.input_values(&u));

        let last_valid = t;
        let diverged = |e: Error| match e {
            Error::NonFinite(_) => Error::Diverged { t: t + h, last_valid },
            other => other,
        };
        let mut y = Vec::with_capacity(n + 3 + z.as_ref().map_or(0, |z| z.len()));
        y.extend_from_slice(&x);
        y.extend_from_slice(&pose);
        match z.as_mut() {
            None => {
                let y1 = rk4_step(
                    |_, y, dy| {
                        model.rhs(&y[..n], &u, c, &mut dy[..n])?;
                        dy[n..n + 3].copy_from_slice(&model.pose_rates(&y[..n], &u, c, y[n + 2]));
                        Ok(())
                    },
                    t,
                    &y,
                    h,
                )
                .map_err(diverged)?;
                x.copy_from_slice(&y1[..n]);
                pose.copy_from_slice(&y1[n..n + 3]);
            }
            Some(zm) => {
                y.extend_from_slice(zm.as_slice());
                let y1 = rk4_step(
                    |_, y, dy| {
                        let lin = linearize(model, &y[..n], &u, c)?;
                        dy[..n].copy_from_slice(&lin.f);
                        dy[n..n + 3].copy_from_slice(&model.pose_rates(&y[..n], &u, c, y[n + 2]));
                        let zs = DMatrix::from_column_slice(n, m, &y[n + 3..]);
                        let zd = lin.f_c + lin.j * zs;
                        dy[n + 3..].copy_from_slice(zd.as_slice());
                        Ok(())
                    },
                    t,
                    &y,
                    h,
                )
                .map_err(diverged)?;
                x.copy_from_slice(&y1[..n]);
                pose.copy_from_slice(&y1[n..n + 3]);
                zm.copy_from_slice(&y1[n + 3..]);
            }
        }
    }
    out.faults = driver.fault_log();
    Ok(out)
}
