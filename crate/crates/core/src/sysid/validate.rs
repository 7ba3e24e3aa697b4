use alloc::vec::Vec;

#[allow(unused_imports)] // resolves to inherent methods when std is linked
use num_traits::Float;

use super::SysidError;
use crate::plant::{simulate_open_loop, FirstOrderModel, VelocityResponse};
use crate::series::TimeSeries;

/// Experimental samples smaller than this (m/s) are left out of MAPD.
pub const MAPD_EPSILON: f64 = 1e-3;

/// Mean absolute percentage deviation of `sim` from `exp`.
///
/// Samples where `|exp| < MAPD_EPSILON` are excluded from the mean.
pub fn mapd(exp: &TimeSeries, sim: &TimeSeries) -> Result<f64, SysidError> {
    exp.check_aligned(sim)?;
    let (sum, count) = exp
        .values()
        .iter()
        .zip(sim.values())
        .filter(|(e, _)| e.abs() >= MAPD_EPSILON)
        .fold((0.0, 0usize), |(sum, n), (e, s)| {
            (sum + ((e - s) / e).abs(), n + 1)
        });
    if count == 0 {
        return Err(SysidError::UndefinedResult);
    }
    Ok(100.0 * sum / count as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepValidation {
    pub amplitude: f64,
    pub mapd: Result<f64, SysidError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub records: Vec<StepValidation>,
}

impl ValidationReport {
    fn defined(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().filter_map(|r| r.mapd.ok())
    }

    /// Largest MAPD over records where it is defined.
    pub fn max_mapd(&self) -> Option<f64> {
        self.defined().reduce(f64::max)
    }

    pub fn mean_mapd(&self) -> Option<f64> {
        let (sum, n) = self.defined().fold((0.0, 0), |(s, n), v| (s + v, n + 1));
        (n > 0).then(|| sum / n as f64)
    }

    /// First per-record failure, if any.
    pub fn first_error(&self) -> Option<(f64, SysidError)> {
        self.records
            .iter()
            .find_map(|r| r.mapd.err().map(|e| (r.amplitude, e)))
    }
}

/// Step responses of `source` at each amplitude, `duration` seconds long.
pub fn step_records(
    source: &dyn VelocityResponse,
    amplitudes: &[f64],
    duration: f64,
    dt: f64,
) -> Result<Vec<(f64, TimeSeries)>, SysidError> {
    let len = (duration / dt).round() as usize + 1;
    amplitudes
        .iter()
        .map(|&a| {
            let u = TimeSeries::constant(dt, len, a)?;
            Ok((a, source.respond(&u)?))
        })
        .collect()
}

/// Compares recorded step responses against `model` driven by the same step.
///
/// Failures are reported per record; a record shorter than five time
/// constants is a configuration error for that record only.
pub fn validate_step(
    model: &FirstOrderModel,
    step_records: &[(f64, TimeSeries)],
) -> ValidationReport {
    let records = step_records
        .iter()
        .map(|(amplitude, exp)| StepValidation {
            amplitude: *amplitude,
            mapd: validate_one(model, *amplitude, exp),
        })
        .collect();
    ValidationReport { records }
}

fn validate_one(model: &FirstOrderModel, amplitude: f64, exp: &TimeSeries) -> Result<f64, SysidError> {
    if exp.duration() < 5.0 * model.tau() * (1.0 - 1e-9) {
        return Err(SysidError::Config("step record shorter than 5 tau"));
    }
    let input = TimeSeries::new(exp.dt(), exp.start_time(), alloc::vec![amplitude; exp.len()])?;
    let sim = simulate_open_loop(model, &input, exp.dt())?;
    mapd(exp, &sim)
}
