use nalgebra::DMatrix;

use crate::dynamics::Model;
use crate::error::Error;
use crate::scenario::ModelKind;
use crate::sensitivity::{beta_sensitivity, SensitivityMatrix};
use crate::sim::faults::FaultActivation;

/// Converged values of a circle run.
#[derive(Clone, Debug, PartialEq)]
pub struct SteadyState {
    pub x: Vec<f64>,
    pub z: Option<SensitivityMatrix>,
}

/// Recorded run. Every per-sample series shares `time`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimOutput {
    pub model: ModelKind,
    pub state_names: Vec<String>,
    pub input_names: Vec<String>,
    pub param_names: Vec<String>,
    /// Parameter vector the run used.
    pub params: Vec<f64>,
    /// Integrator step [s].
    pub step: f64,
    pub time: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Global `(X, Y, ψ)`.
    pub pose: Vec<[f64; 3]>,
    /// Input held over the step starting at each sample.
    pub inputs: Vec<Vec<f64>>,
    /// Present iff sensitivities were integrated.
    pub sensitivities: Option<Vec<SensitivityMatrix>>,
    pub faults: Vec<FaultActivation>,
    pub wheel_lift: Vec<[bool; 4]>,
    /// Input of every integrator step, undecimated.
    pub applied_inputs: Vec<Vec<f64>>,
    pub steady_state: Option<SteadyState>,
}

fn owned(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl SimOutput {
    pub(crate) fn empty<M: Model>(model: &M, c: &[f64], step: f64, sensitivity: bool) -> Self {
        Self {
            model: M::KIND,
            state_names: owned(model.state_names()),
            input_names: owned(model.input_names()),
            param_names: owned(model.param_names()),
            params: c.to_vec(),
            step,
            time: Vec::new(),
            states: Vec::new(),
            pose: Vec::new(),
            inputs: Vec::new(),
            sensitivities: sensitivity.then(Vec::new),
            faults: Vec::new(),
            wheel_lift: Vec::new(),
            applied_inputs: Vec::new(),
            steady_state: None,
        }
    }

    pub(crate) fn push_sample(
        &mut self,
        t: f64,
        x: &[f64],
        pose: [f64; 3],
        u: Vec<f64>,
        z: Option<&DMatrix<f64>>,
        lift: [bool; 4],
    ) {
        self.time.push(t);
        self.states.push(x.to_vec());
        self.pose.push(pose);
        self.inputs.push(u);
        if let (Some(zs), Some(z)) = (self.sensitivities.as_mut(), z) {
            zs.push(z.clone());
        }
        self.wheel_lift.push(lift);
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn state_index(&self, name: &str) -> Result<usize, Error> {
        self.state_names
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn param_index(&self, name: &str) -> Result<usize, Error> {
        self.param_names
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn state_series(&self, name: &str) -> Result<Vec<f64>, Error> {
        let i = self.state_index(name)?;
        Ok(self.states.iter().map(|x| x[i]).collect())
    }

    /// `Z_{state, param}(t)` over the time grid.
    pub fn z_series(&self, state: &str, param: &str) -> Result<Vec<f64>, Error> {
        let zs = self.sensitivities.as_ref().ok_or(Error::MissingSensitivity)?;
        let (i, k) = (self.state_index(state)?, self.param_index(param)?);
        Ok(zs.iter().map(|z| z[(i, k)]).collect())
    }

    /// Side-slip angle `β = atan(v_y / v_x)` of the double-track model, or the
    /// state itself for the single-track model.
    pub fn beta_series(&self) -> Result<Vec<f64>, Error> {
        match self.model {
            ModelKind::SingleTrack => self.state_series("beta"),
            ModelKind::DoubleTrack => Ok(self.states.iter().map(|x| x[1].atan2(x[0])).collect()),
        }
    }

    /// `Z_{β, param}(t)`; for the double-track model from the velocity
    /// sensitivities by the chain rule.
    pub fn beta_z_series(&self, param: &str) -> Result<Vec<f64>, Error> {
        match self.model {
            ModelKind::SingleTrack => self.z_series("beta", param),
            ModelKind::DoubleTrack => {
                let zvx = self.z_series("v_x", param)?;
                let zvy = self.z_series("v_y", param)?;
                self.states
                    .iter()
                    .zip(zvx.iter().zip(&zvy))
                    .map(|(x, (a, b))| beta_sensitivity(x[0], x[1], *a, *b))
                    .collect()
            }
        }
    }

    /// Time of the first fault activation.
    pub fn fault_time(&self) -> Option<f64> {
        self.faults.iter().map(|f| f.time).reduce(f64::min)
    }
}
