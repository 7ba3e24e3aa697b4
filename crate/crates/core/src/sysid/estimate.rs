use alloc::vec::Vec;

#[allow(unused_imports)] // resolves to inherent methods when std is linked
use num_traits::Float;

use super::{run_sweep, MagnitudePoint, SweepRecord, SweepSpec, SysidError};
use crate::plant::{simulate_open_loop, FirstOrderModel, VelocityResponse};
use crate::series::TimeSeries;

/// `10 log10(2)`, the drop at the corner of a first-order lag.
pub const HALF_POWER_DB: f64 = 3.010_299_956_639_812;

const GOLDEN_TOL: f64 = 1e-4;

/// Gain from the lowest-frequency magnitude, `10^(M / 20)`.
pub fn estimate_gain(bode: &[MagnitudePoint]) -> Result<f64, SysidError> {
    let lowest = bode
        .iter()
        .min_by(|a, b| a.omega.total_cmp(&b.omega))
        .ok_or(SysidError::Config("empty magnitude plot"))?;
    Ok(10f64.powf(lowest.mag_db / 20.0))
}

/// Time constant read off the -3 dB crossing, with the range spanned by the
/// two grid points that bracket it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauRange {
    pub lower: f64,
    pub upper: f64,
    /// `1 / omega_c` at the interpolated crossing.
    pub tau: f64,
}

impl TauRange {
    pub fn contains(&self, tau: f64) -> bool {
        self.lower <= tau && tau <= self.upper
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

pub fn estimate_tau_cutoff(bode: &[MagnitudePoint], gain_k: f64) -> Result<TauRange, SysidError> {
    if !(gain_k > 0.0) {
        return Err(SysidError::Config("gain must be positive"));
    }
    let level = 20.0 * gain_k.log10() - HALF_POWER_DB;
    for pair in bode.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a.mag_db >= level && b.mag_db < level {
            let (la, lb) = (a.omega.ln(), b.omega.ln());
            let frac = (a.mag_db - level) / (a.mag_db - b.mag_db);
            let omega_c = (la + frac * (lb - la)).exp();
            return Ok(TauRange {
                lower: 1.0 / b.omega,
                upper: 1.0 / a.omega,
                tau: 1.0 / omega_c,
            });
        }
    }
    Err(SysidError::CrossingNotFound)
}

/// Sum of squared errors between the recorded outputs and the model driven
/// by the recorded inputs.
fn sum_squared_error(
    model: &FirstOrderModel,
    records: &[(TimeSeries, TimeSeries)],
) -> Result<f64, SysidError> {
    let mut sse = 0.0;
    for (input, output) in records {
        let sim = simulate_open_loop(model, input, input.dt())?;
        sse += sim
            .values()
            .iter()
            .zip(output.values())
            .map(|(s, y)| (s - y) * (s - y))
            .sum::<f64>();
    }
    Ok(sse)
}

/// Golden-section search for the time constant minimising the record SSE
/// at fixed gain. A flat objective returns the range midpoint.
pub fn refine_tau_ls(
    structure_gain: f64,
    tau_range: (f64, f64),
    records: &[(TimeSeries, TimeSeries)],
) -> Result<f64, SysidError> {
    let (mut a, mut b) = tau_range;
    if !(a > 0.0 && b >= a && b.is_finite()) {
        return Err(SysidError::Config("time constant range must satisfy 0 < lower <= upper"));
    }
    if records.is_empty() {
        return Err(SysidError::Config("least squares needs at least one record"));
    }
    for (input, output) in records {
        input.check_aligned(output)?;
    }
    let base = FirstOrderModel::new(structure_gain, a)?;
    let cost = |tau: f64| sum_squared_error(&base.with_tau(tau)?, records);

    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = cost(x1)?;
    let mut f2 = cost(x2)?;
    let first = f1;
    let mut flat = f1 == f2;
    while b - a > GOLDEN_TOL {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = cost(x1)?;
            flat &= f1 == first;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = cost(x2)?;
            flat &= f2 == first;
        }
    }
    if flat {
        return Ok(0.5 * (tau_range.0 + tau_range.1));
    }
    Ok(0.5 * (a + b))
}

/// Slope in dB/decade over the top half-decade of the sweep.
pub fn high_freq_slope(bode: &[MagnitudePoint]) -> Result<f64, SysidError> {
    let top = bode
        .iter()
        .map(|p| p.omega)
        .fold(f64::NEG_INFINITY, f64::max);
    let cutoff = top / 10f64.sqrt() * (1.0 - 1e-12);
    let pts: Vec<(f64, f64)> = bode
        .iter()
        .filter(|p| p.omega >= cutoff)
        .map(|p| (p.omega.log10(), p.mag_db))
        .collect();
    if pts.len() < 2 {
        return Err(SysidError::Config("need 2+ points in the top half-decade"));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(SysidError::Config("degenerate frequency spread"));
    }
    Ok(sxy / sxx)
}

/// Result of the identification pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentifiedModel {
    pub model: FirstOrderModel,
    /// Uncorrected `10^(M(omega_l) / 20)`.
    pub low_freq_gain: f64,
    pub tau_range: TauRange,
    pub slope_high_db_per_decade: f64,
    pub fit_sse: f64,
    /// Mean `|peak output frequency - input frequency|` over the sweep.
    pub lti_freq_deviation: f64,
}

const GAIN_ITERATIONS: usize = 50;

/// Identifies a first-order model from sweep records.
///
/// The low-frequency magnitude still carries the lag's roll-off
/// `1 / sqrt(1 + (tau omega_l)^2)`, so the gain is corrected with the
/// current time constant estimate and the corner located again until both
/// agree. The time constant is then refined by least squares inside the
/// bracketing range and the gain corrected once more.
pub fn identify_from_records(records: &[SweepRecord]) -> Result<IdentifiedModel, SysidError> {
    if records.is_empty() {
        return Err(SysidError::Config("no sweep records"));
    }
    let bode: Vec<MagnitudePoint> = records.iter().map(|r| r.magnitude).collect();
    let omega_low = bode[0].omega;
    let raw_gain = estimate_gain(&bode)?;
    let correct = |tau: f64| raw_gain * (1.0 + (tau * omega_low).powi(2)).sqrt();

    let mut gain = raw_gain;
    let mut range = estimate_tau_cutoff(&bode, gain)?;
    for _ in 0..GAIN_ITERATIONS {
        let next = correct(range.tau);
        range = estimate_tau_cutoff(&bode, next)?;
        let done = (next - gain).abs() <= 1e-12 * next;
        gain = next;
        if done {
            break;
        }
    }

    let pairs: Vec<(TimeSeries, TimeSeries)> = records
        .iter()
        .map(|r| (r.input.clone(), r.output.clone()))
        .collect();
    let tau = refine_tau_ls(gain, (range.lower, range.upper), &pairs)?;
    let model = FirstOrderModel::new(correct(tau), tau)?;
    let fit_sse = sum_squared_error(&model, &pairs)?;
    let lti_freq_deviation = records
        .iter()
        .map(|r| (r.peak_omega - r.omega).abs())
        .sum::<f64>()
        / records.len() as f64;
    Ok(IdentifiedModel {
        model,
        low_freq_gain: raw_gain,
        tau_range: range,
        slope_high_db_per_decade: high_freq_slope(&bode)?,
        fit_sse,
        lti_freq_deviation,
    })
}

/// Sweeps `source` and identifies it.
pub fn identify(
    source: &dyn VelocityResponse,
    spec: &SweepSpec,
    dt: f64,
) -> Result<(Vec<SweepRecord>, IdentifiedModel), SysidError> {
    let records = run_sweep(source, spec, dt)?;
    let model = identify_from_records(&records)?;
    Ok((records, model))
}
