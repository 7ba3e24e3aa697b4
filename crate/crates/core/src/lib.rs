//! Identification and sliding-mode position control for velocity-stabilized
//! rotorcraft whose inner loop is a vendor black box.
//!
//! Everything here is allocation-only `no_std`: file formats, configuration
//! and the command line live in the `brickfly` crate.

#![no_std]

extern crate alloc;

pub mod control;
pub mod nav;
pub mod plant;
pub mod series;
pub mod sysid;

/// Per-axis triple in X, Y, Z order.
pub type Vec3 = [f64; 3];

pub use plant::{
    apply_saturation, perturb_for_mass, sample_wind, simulate_open_loop, step_axis,
    AugmentedPlant, AxisState, FirstOrderModel, PlantError, SaturationLimits, SecondOrderMode,
    UavPlant, VelocityResponse, WindModel, WindProcess,
};
pub use control::{
    pd_control, reaching_rate, sliding_surface, smc_control, smc_control_hard_sign, AxisFeedback,
    AxisLaw, ControlError, ControllerSet, PdParams, SmcParams,
};
pub use nav::{
    band_hold_monitor, closed_loop_step, compare_controllers, rise_time_90, run_mission,
    tune_pd_heuristic, ComparisonReport, Mission, MissionResult, NavError, Phase, RunMetrics,
    Trajectory, TrajectorySample,
};
pub use series::{SeriesError, TimeSeries};
