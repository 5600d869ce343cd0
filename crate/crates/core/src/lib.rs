//! Vehicle dynamics models with direct-method parameter sensitivities.
//!
//! The crate provides a nonlinear double-track model (Magic Formula tires,
//! lift/roll/pitch load transfer, wheel spin) and a linear single-track model
//! with front and rear steering. Both are written against a generic scalar so
//! that exact Jacobians come from forward-mode dual numbers; the sensitivity
//! system `Ż = f_c + J Z` is integrated alongside the model.

pub mod ackermann;
pub mod dual;
pub mod dynamics;
pub mod error;
pub mod odd;
pub mod params;
pub mod report;
pub mod scenario;
pub mod sensitivity;
pub mod sim;
pub mod state;
pub mod tire;

pub use dynamics::{DoubleTrack, Model, SingleTrack};
pub use error::{Error, Result};
pub use params::{ParamSet, StParams, ValidatedParams, Wheel};
pub use state::{ControlInput, DtState, StInput, StState};
