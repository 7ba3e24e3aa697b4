//! Frequency-domain identification of a first-order velocity model.
//!
//! The workflow is: drive the black box with a sine sweep, check that each
//! output is dominated by the input frequency, build a magnitude plot, read
//! the gain off the low-frequency end and the time constant off the -3 dB
//! crossing, refine the time constant by least squares against the sine
//! records, and finally compare step responses with MAPD.

mod bode;
mod estimate;
mod spectrum;
mod validate;

pub use bode::{
    build_bode, generate_sine, magnitude_at, run_sweep, sweep_point, MagnitudePoint, SweepRecord,
    SweepSpec, SETTLE_FLOOR_S,
};
pub use estimate::{
    estimate_gain, estimate_tau_cutoff, high_freq_slope, identify, identify_from_records,
    refine_tau_ls, IdentifiedModel, TauRange, HALF_POWER_DB,
};
pub use spectrum::peak_frequency;
pub use validate::{mapd, step_records, validate_step, StepValidation, ValidationReport, MAPD_EPSILON};

use thiserror::Error;

use crate::plant::PlantError;
use crate::series::SeriesError;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SysidError {
    #[error("invalid configuration: {0}")]
    Config(&'static str),
    #[error("no dominant non-DC frequency in the record")]
    NoDominantFrequency,
    #[error("magnitude never crosses the -3 dB level inside the sweep")]
    CrossingNotFound,
    #[error("MAPD undefined: every experimental sample is below the division guard")]
    UndefinedResult,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Plant(#[from] PlantError),
}
