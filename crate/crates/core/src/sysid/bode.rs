use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // resolves to inherent methods when std is linked
use num_traits::Float;

use super::{peak_frequency, SysidError};
use crate::plant::VelocityResponse;
use crate::series::TimeSeries;

/// Shortest transient discarded before measuring, five times the slowest
/// plausible time constant (0.9 s).
pub const SETTLE_FLOOR_S: f64 = 4.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    omegas: Vec<f64>,
    amplitude: f64,
    cycles_per_point: u32,
    settle_cycles: u32,
}

impl SweepSpec {
    pub const DEFAULT_POINTS: usize = 25;
    pub const DEFAULT_CYCLES: u32 = 8;
    pub const DEFAULT_SETTLE_CYCLES: u32 = 3;
    pub const OMEGA_LOW: f64 = 0.4;
    pub const OMEGA_HIGH: f64 = 15.0;

    pub fn new(
        omegas: Vec<f64>,
        amplitude: f64,
        cycles_per_point: u32,
        settle_cycles: u32,
    ) -> Result<Self, SysidError> {
        if omegas.is_empty() {
            return Err(SysidError::Config("sweep needs at least one frequency"));
        }
        if !omegas.iter().all(|w| w.is_finite() && *w > 0.0) {
            return Err(SysidError::Config("sweep frequencies must be positive"));
        }
        if omegas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SysidError::Config("sweep frequencies must be strictly increasing"));
        }
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(SysidError::Config("sweep amplitude must be positive"));
        }
        if cycles_per_point < settle_cycles + 2 {
            return Err(SysidError::Config(
                "cycles_per_point must exceed settle_cycles by at least 2",
            ));
        }
        Ok(Self {
            omegas,
            amplitude,
            cycles_per_point,
            settle_cycles,
        })
    }

    /// `points` log-spaced frequencies over `[low, high]` with default cycle counts.
    pub fn log_spaced(low: f64, high: f64, points: usize, amplitude: f64) -> Result<Self, SysidError> {
        if !(low > 0.0 && high > low) || points < 2 {
            return Err(SysidError::Config("log sweep needs 0 < low < high and 2+ points"));
        }
        let ratio = (high / low).ln() / (points - 1) as f64;
        let omegas = (0..points)
            .map(|k| if k + 1 == points { high } else { low * (ratio * k as f64).exp() })
            .collect();
        Self::new(
            omegas,
            amplitude,
            Self::DEFAULT_CYCLES,
            Self::DEFAULT_SETTLE_CYCLES,
        )
    }

    /// 25 points over [0.4, 15] rad/s.
    pub fn paper_default(amplitude: f64) -> Result<Self, SysidError> {
        Self::log_spaced(Self::OMEGA_LOW, Self::OMEGA_HIGH, Self::DEFAULT_POINTS, amplitude)
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn cycles_per_point(&self) -> u32 {
        self.cycles_per_point
    }

    pub fn settle_cycles(&self) -> u32 {
        self.settle_cycles
    }

    /// Record length at `omega`: the settle window plus the measured cycles.
    pub fn duration_at(&self, omega: f64) -> f64 {
        let period = 2.0 * PI / omega;
        settle_time(omega, self.settle_cycles)
            + (self.cycles_per_point - self.settle_cycles) as f64 * period
    }
}

fn settle_time(omega: f64, settle_cycles: u32) -> f64 {
    (settle_cycles as f64 * 2.0 * PI / omega).max(SETTLE_FLOOR_S)
}

/// One point of a magnitude plot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnitudePoint {
    pub omega: f64,
    pub mag_db: f64,
}

/// `amplitude * sin(omega t)` sampled every `dt` over `[0, duration]`.
pub fn generate_sine(
    amplitude: f64,
    omega: f64,
    duration: f64,
    dt: f64,
) -> Result<TimeSeries, SysidError> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(SysidError::Config("sine frequency must be positive"));
    }
    if !(dt > 0.0) {
        return Err(SysidError::Config("sample interval must be positive"));
    }
    if duration < 2.0 * (2.0 * PI / omega) * (1.0 - 1e-12) {
        return Err(SysidError::Config("sine record must cover at least two periods"));
    }
    let len = (duration / dt + 1e-9).floor() as usize + 1;
    Ok(TimeSeries::from_fn(dt, len, |t| amplitude * (omega * t).sin())?)
}

/// Least-squares fit of `a sin(wt) + b cos(wt) + c`; returns `hypot(a, b)`.
fn sine_amplitude(ts: &TimeSeries, start: usize, omega: f64) -> f64 {
    // normal equations, symmetric 3x3
    let mut m = [[0.0f64; 3]; 3];
    let mut r = [0.0f64; 3];
    for (k, &y) in ts.values().iter().enumerate().skip(start) {
        let t = ts.time_at(k);
        let basis = [(omega * t).sin(), (omega * t).cos(), 1.0];
        for i in 0..3 {
            r[i] += basis[i] * y;
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
        }
    }
    let coef = solve3(m, r);
    coef[0].hypot(coef[1])
}

fn solve3(mut m: [[f64; 3]; 3], mut r: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
            .unwrap_or(col);
        m.swap(col, pivot);
        r.swap(col, pivot);
        if m[col][col] == 0.0 {
            continue;
        }
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            r[row] -= f * r[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        if m[row][row] == 0.0 {
            continue;
        }
        let tail: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (r[row] - tail) / m[row][row];
    }
    x
}

/// Steady-state gain in dB from `input` to `output` at `omega`.
///
/// Drops the first `max(4.5 s, settle_cycles periods)` and fits a sinusoid
/// at `omega` to what remains of each record.
pub fn magnitude_at(
    input: &TimeSeries,
    output: &TimeSeries,
    omega: f64,
    settle_cycles: u32,
) -> Result<f64, SysidError> {
    input.check_aligned(output)?;
    let dt = input.dt();
    if !(omega > 0.0) || omega * dt >= PI {
        return Err(SysidError::Config("frequency outside the Nyquist range"));
    }
    let start = (settle_time(omega, settle_cycles) / dt - 1e-9).ceil() as usize;
    if start + 8 > input.len() {
        return Err(SysidError::Config("record too short after the settle window"));
    }
    let in_amp = sine_amplitude(input, start, omega);
    if !(in_amp > 0.0) {
        return Err(SysidError::Config("input carries no excitation at this frequency"));
    }
    let out_amp = sine_amplitude(output, start, omega);
    Ok(20.0 * (out_amp / in_amp).log10())
}

/// Everything recorded at one sweep frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub omega: f64,
    pub input: TimeSeries,
    pub output: TimeSeries,
    pub magnitude: MagnitudePoint,
    /// Dominant frequency of the settled output.
    pub peak_omega: f64,
}

pub fn sweep_point(
    source: &dyn VelocityResponse,
    omega: f64,
    spec: &SweepSpec,
    dt: f64,
) -> Result<SweepRecord, SysidError> {
    let input = generate_sine(spec.amplitude, omega, spec.duration_at(omega), dt)?;
    let output = source.respond(&input)?;
    let mag_db = magnitude_at(&input, &output, omega, spec.settle_cycles)?;
    let start = (settle_time(omega, spec.settle_cycles) / dt - 1e-9).ceil() as usize;
    let peak_omega = peak_frequency(&output.tail_from(start)?)?;
    Ok(SweepRecord {
        omega,
        input,
        output,
        magnitude: MagnitudePoint { omega, mag_db },
        peak_omega,
    })
}

/// Runs every point of `spec` in order.
pub fn run_sweep(
    source: &dyn VelocityResponse,
    spec: &SweepSpec,
    dt: f64,
) -> Result<Vec<SweepRecord>, SysidError> {
    spec.omegas
        .iter()
        .map(|&w| sweep_point(source, w, spec, dt))
        .collect()
}

/// Magnitude plot of `source` over `spec`, ascending in omega.
pub fn build_bode(
    source: &dyn VelocityResponse,
    spec: &SweepSpec,
    dt: f64,
) -> Result<Vec<MagnitudePoint>, SysidError> {
    Ok(run_sweep(source, spec, dt)?
        .into_iter()
        .map(|r| r.magnitude)
        .collect())
}
