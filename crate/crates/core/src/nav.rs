//! Point-to-point missions: take off, fly to the target, hold inside the
//! accuracy band, land.

use alloc::vec::Vec;

#[allow(unused_imports)] // resolves to inherent methods when std is linked
use num_traits::Float;
use thiserror::Error;

use crate::control::{AxisFeedback, AxisLaw, ControllerSet, PdParams};
use crate::plant::{
    apply_saturation, step_axis, AxisState, FirstOrderModel, PlantError, UavPlant, WindModel,
};
use crate::series::{SeriesError, TimeSeries};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum NavError {
    #[error("invalid mission: {0}")]
    Config(&'static str),
    #[error("simulation produced a non-finite state at t = {0} s")]
    NumericFault(f64),
    #[error(transparent)]
    Plant(PlantError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

impl From<PlantError> for NavError {
    fn from(e: PlantError) -> Self {
        match e {
            PlantError::NonFinite(_) => NavError::NumericFault(f64::NAN),
            other => NavError::Plant(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mission {
    pub target: Vec3,
    pub band_half_width: f64,
    pub hold_duration: f64,
    pub min_op_height: f64,
    pub timeout: f64,
    pub dt: f64,
}

impl Mission {
    pub const DEFAULT_BAND: f64 = 0.08;
    pub const DEFAULT_HOLD: f64 = 5.0;
    pub const DEFAULT_MIN_OP_HEIGHT: f64 = 1.0;
    pub const DEFAULT_TIMEOUT: f64 = 60.0;

    /// Default band, hold, height, timeout and the 50 Hz plant rate.
    pub fn to(target: Vec3) -> Self {
        Self {
            target,
            band_half_width: Self::DEFAULT_BAND,
            hold_duration: Self::DEFAULT_HOLD,
            min_op_height: Self::DEFAULT_MIN_OP_HEIGHT,
            timeout: Self::DEFAULT_TIMEOUT,
            dt: crate::plant::DEFAULT_DT,
        }
    }

    pub fn validate(&self) -> Result<(), NavError> {
        let all = [
            self.target[0],
            self.target[1],
            self.target[2],
            self.band_half_width,
            self.hold_duration,
            self.min_op_height,
            self.timeout,
            self.dt,
        ];
        if !all.iter().all(|v| v.is_finite()) {
            return Err(NavError::Config("non-finite mission parameter"));
        }
        if self.band_half_width <= 0.0 {
            return Err(NavError::Config("band half-width must be positive"));
        }
        if self.hold_duration <= 0.0 {
            return Err(NavError::Config("hold duration must be positive"));
        }
        if self.timeout <= self.hold_duration {
            return Err(NavError::Config("timeout must exceed hold duration"));
        }
        if self.min_op_height < 0.0 {
            return Err(NavError::Config("minimum operating height must be non-negative"));
        }
        if self.dt <= 0.0 {
            return Err(NavError::Config("time step must be positive"));
        }
        Ok(())
    }

    fn hold_samples(&self) -> usize {
        (self.hold_duration / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Takeoff,
    Navigate,
    Land,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Takeoff => "takeoff",
            Phase::Navigate => "navigate",
            Phase::Land => "land",
        }
    }
}

/// State at `t`, the command applied over `[t, t + dt)` and the wind then.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub position: Vec3,
    /// Over ground.
    pub velocity: Vec3,
    pub command: Vec3,
    pub wind: Vec3,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    fn axis_series(&self, f: impl Fn(&TrajectorySample) -> f64) -> Result<TimeSeries, SeriesError> {
        TimeSeries::new(self.dt, 0.0, self.samples.iter().map(f).collect())
    }

    pub fn position(&self, axis: usize) -> Result<TimeSeries, SeriesError> {
        self.axis_series(|s| s.position[axis])
    }

    pub fn velocity(&self, axis: usize) -> Result<TimeSeries, SeriesError> {
        self.axis_series(|s| s.velocity[axis])
    }

    pub fn command(&self, axis: usize) -> Result<TimeSeries, SeriesError> {
        self.axis_series(|s| s.command[axis])
    }

    /// Index range of the samples flown in `phase`.
    pub fn phase_range(&self, phase: Phase) -> Option<core::ops::Range<usize>> {
        let start = self.samples.iter().position(|s| s.phase == phase)?;
        let len = self.samples[start..]
            .iter()
            .take_while(|s| s.phase == phase)
            .count();
        Some(start..start + len)
    }

    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionResult {
    /// Start of the band-hold window.
    pub settle_time: Option<f64>,
    /// End of the band-hold window, when descent is commanded.
    pub land_time: Option<f64>,
    /// Largest per-axis `|p - target|` over the hold window, or over the
    /// last `hold_duration` before timeout when the band was never held.
    pub max_dev_after_settle: Vec3,
    pub success: bool,
    pub trajectory: Trajectory,
}

impl MissionResult {
    pub fn max_deviation(&self) -> f64 {
        self.max_dev_after_settle.iter().cloned().fold(0.0, f64::max)
    }
}

/// Below this height (m) the descent is considered complete.
const TOUCHDOWN_HEIGHT: f64 = 0.05;
/// Longest simulated descent, s.
const MAX_DESCENT: f64 = 15.0;

fn within_band(position: &Vec3, target: &Vec3, band: f64) -> bool {
    position
        .iter()
        .zip(target)
        .all(|(p, t)| (p - t).abs() <= band)
}

/// Flies `mission` on `plant` under `controllers`.
///
/// Takeoff climbs on Z alone to `min_op_height`; navigation then drives all
/// axes toward the target until every axis has stayed inside the band for
/// `hold_duration`, after which a descent is commanded. Running out of time
/// is reported through `success == false`, not as an error.
pub fn run_mission(
    mut plant: UavPlant,
    controllers: &ControllerSet,
    mission: &Mission,
) -> Result<MissionResult, NavError> {
    mission.validate()?;
    let dt = mission.dt;
    let hold_samples = mission.hold_samples();
    let takeoff_target = [0.0, 0.0, mission.min_op_height];

    let mut samples: Vec<TrajectorySample> = Vec::new();
    let mut phase = Phase::Takeoff;
    let mut hold_start: Option<usize> = None;
    let mut settled: Option<(usize, usize)> = None;
    let mut k = 0usize;
    loop {
        let t = k as f64 * dt;
        let position = plant.position();
        let velocity = plant.ground_velocity();
        if !position.iter().chain(&velocity).all(|v| v.is_finite()) {
            return Err(NavError::NumericFault(t));
        }

        if phase == Phase::Takeoff
            && (position[2] - mission.min_op_height).abs() <= mission.band_half_width
        {
            phase = Phase::Navigate;
        }
        if phase == Phase::Navigate {
            if within_band(&position, &mission.target, mission.band_half_width) {
                let start = *hold_start.get_or_insert(k);
                if k - start >= hold_samples {
                    settled = Some((start, k));
                    phase = Phase::Land;
                }
            } else {
                hold_start = None;
            }
        }
        let done = match phase {
            Phase::Takeoff | Phase::Navigate => t >= mission.timeout - 1e-9,
            Phase::Land => {
                let landed_at = settled.map_or(0, |(_, end)| end) as f64 * dt;
                position[2] <= TOUCHDOWN_HEIGHT || t - landed_at >= MAX_DESCENT - 1e-9
            }
        };

        let mut command = [0.0; 3];
        if !done {
            let targets = match phase {
                Phase::Takeoff => takeoff_target,
                Phase::Navigate => mission.target,
                Phase::Land => [mission.target[0], mission.target[1], 0.0],
            };
            for axis in 0..3 {
                if phase == Phase::Takeoff && axis < 2 {
                    continue;
                }
                let fb = AxisFeedback {
                    position: position[axis],
                    velocity: velocity[axis],
                    target: targets[axis],
                };
                command[axis] = controllers.laws[axis].command(&fb);
            }
        }
        let wind = plant.current_wind();
        let applied = if done {
            command
        } else {
            plant.step(command, dt).map_err(|e| match e {
                PlantError::NonFinite(_) => NavError::NumericFault(t),
                other => NavError::Plant(other),
            })?
        };
        samples.push(TrajectorySample {
            t,
            position,
            velocity,
            command: applied,
            wind,
            phase,
        });
        if done {
            break;
        }
        k += 1;
    }

    let trajectory = Trajectory { dt, samples };
    let window = match settled {
        Some((start, end)) => start..end + 1,
        None => {
            let end = trajectory.samples.len();
            end.saturating_sub(hold_samples + 1)..end
        }
    };
    let mut max_dev = [0.0f64; 3];
    for s in &trajectory.samples[window] {
        for axis in 0..3 {
            max_dev[axis] = max_dev[axis].max((s.position[axis] - mission.target[axis]).abs());
        }
    }
    Ok(MissionResult {
        settle_time: settled.map(|(start, _)| start as f64 * dt),
        land_time: settled.map(|(_, end)| end as f64 * dt),
        max_dev_after_settle: max_dev,
        success: settled.is_some(),
        trajectory,
    })
}

/// Earliest `t0` such that every axis stays within `band_half_width` of its
/// target over the whole window `[t0, t0 + hold_duration]`.
///
/// The trajectories must be aligned; the window is counted in samples,
/// `round(hold_duration / dt)`.
pub fn band_hold_monitor(
    trajectories: &[TimeSeries],
    target: &[f64],
    band_half_width: f64,
    hold_duration: f64,
    dt: f64,
) -> Option<f64> {
    let first = trajectories.first()?;
    if trajectories.len() != target.len()
        || trajectories.iter().any(|ts| first.check_aligned(ts).is_err())
    {
        return None;
    }
    let need = (hold_duration / dt).round() as usize;
    let mut run_start: Option<usize> = None;
    for k in 0..first.len() {
        let inside = trajectories
            .iter()
            .zip(target)
            .all(|(ts, goal)| (ts.values()[k] - goal).abs() <= band_half_width);
        if inside {
            let start = *run_start.get_or_insert(k);
            if k - start >= need {
                return Some(first.time_at(start));
            }
        } else {
            run_start = None;
        }
    }
    None
}

/// First time the position series crosses 90% of the way from its first
/// sample to `target`, relative to the series start.
pub fn rise_time_90(position: &TimeSeries, target: f64) -> Option<f64> {
    let start = position.values()[0];
    let span = target - start;
    if span == 0.0 {
        return Some(0.0);
    }
    let level = start + 0.9 * span;
    position
        .values()
        .iter()
        .position(|&p| (p - level) * span.signum() >= 0.0)
        .map(|k| k as f64 * position.dt())
}

/// Single-axis closed-loop position step from rest at the origin.
pub fn closed_loop_step(
    plant_model: &FirstOrderModel,
    law: &AxisLaw,
    target: f64,
    limit: f64,
    dt: f64,
    duration: f64,
) -> Result<TimeSeries, NavError> {
    let n = (duration / dt).round() as usize + 1;
    let mut state = AxisState::default();
    let mut out = Vec::with_capacity(n);
    out.push(state.position);
    for _ in 1..n {
        let fb = AxisFeedback {
            position: state.position,
            velocity: state.velocity,
            target,
        };
        let u = apply_saturation(law.command(&fb), limit);
        state = step_axis(plant_model, state, u, 0.0, dt)?;
        out.push(state.position);
    }
    Ok(TimeSeries::new(dt, 0.0, out)?)
}

fn overshoot(ts: &TimeSeries, target: f64) -> f64 {
    let peak = ts.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (peak - target) / target
}

/// Emulates iterative hand tuning of the PD baseline on a 1 m step:
/// raise `k_p` in 0.05 steps until the overshoot first reaches 5%, then
/// raise `k_d` in 0.05 steps until it drops to 1% or less.
pub fn tune_pd_heuristic(model: &FirstOrderModel, limit: f64, dt: f64) -> Result<PdParams, NavError> {
    const STEP: f64 = 0.05;
    const HORIZON: f64 = 30.0;
    let trial = |k_p: f64, k_d: f64| -> Result<f64, NavError> {
        let law = AxisLaw::Pd(PdParams { k_p, k_d });
        Ok(overshoot(&closed_loop_step(model, &law, 1.0, limit, dt, HORIZON)?, 1.0))
    };
    let mut k_p = STEP;
    while trial(k_p, 0.0)? < 0.05 {
        k_p += STEP;
        if k_p > 50.0 {
            return Err(NavError::Config("proportional gain never produced overshoot"));
        }
    }
    let mut k_d = 0.0;
    while trial(k_p, k_d)? > 0.01 {
        k_d += STEP;
        if k_d > 50.0 {
            return Err(NavError::Config("derivative gain never damped overshoot"));
        }
    }
    // keep the printed presets short
    let round = |x: f64| (x * 100.0).round() / 100.0;
    Ok(PdParams {
        k_p: round(k_p),
        k_d: round(k_d),
    })
}

/// Headline numbers of one mission run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    pub success: bool,
    pub settle_time: Option<f64>,
    pub land_time: Option<f64>,
    pub max_deviation: f64,
    /// RMS of the applied command vector over the whole run, m/s.
    pub effort_rms: f64,
}

impl RunMetrics {
    pub fn of(result: &MissionResult) -> Self {
        let samples = &result.trajectory.samples;
        let sq: f64 = samples
            .iter()
            .map(|s| s.command.iter().map(|u| u * u).sum::<f64>())
            .sum();
        Self {
            success: result.success,
            settle_time: result.settle_time,
            land_time: result.land_time,
            max_deviation: result.max_deviation(),
            effort_rms: (sq / samples.len().max(1) as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub smc: MissionResult,
    pub pd: MissionResult,
    pub smc_metrics: RunMetrics,
    pub pd_metrics: RunMetrics,
}

/// Flies the same mission under both controller sets with identical wind.
pub fn compare_controllers(
    plant: &UavPlant,
    smc: &ControllerSet,
    pd: &ControllerSet,
    mission: &Mission,
    wind: Option<WindModel>,
) -> Result<ComparisonReport, NavError> {
    let build = || -> Result<UavPlant, NavError> {
        let p = plant.clone();
        Ok(match wind {
            Some(w) => p.with_wind(w)?,
            None => p,
        })
    };
    let smc_result = run_mission(build()?, smc, mission)?;
    let pd_result = run_mission(build()?, pd, mission)?;
    Ok(ComparisonReport {
        smc_metrics: RunMetrics::of(&smc_result),
        pd_metrics: RunMetrics::of(&pd_result),
        smc: smc_result,
        pd: pd_result,
    })
}
