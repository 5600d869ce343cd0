//! Integration, fault injection, control and experiment runners.

pub mod controller;
pub mod csv_io;
pub mod experiments;
pub mod faults;
pub mod integrator;
pub mod output;
pub mod runner;

pub use controller::{tracking_controller, Replay, StTracker, Steering, Tracker};
pub use csv_io::{read_csv_file, write_csv, write_csv_file, CsvTable};
pub use experiments::{
    circle_sweep, fault_reference_scenario, fault_sweep, locked_steering_fault, odd_batch, SWEEP_RADIUS,
    single_track_replay, CircleSweepRow, FaultSweep, OddRun,
};
pub use faults::{apply_faults, FaultActivation, FaultInjector};
pub use integrator::{integrate, rk4_step, Driver, IntegratorConfig};
pub use output::{SimOutput, SteadyState};
pub use runner::{run_config, run_scenario, RunSetup};
