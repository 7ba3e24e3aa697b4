//! Black-box model of a velocity-stabilized rotorcraft.
//!
//! The vendor stabilizer and the airframe are treated as one unit per
//! translational axis: commanded velocity in, actual velocity out, with a
//! first-order lag `K / (1 + tau s)` in between. Wind drifts the airframe
//! relative to the ground and a payload slows the response down.

#[allow(unused_imports)] // resolves to inherent methods when std is linked
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::series::{same_interval, SeriesError, TimeSeries};
use crate::Vec3;

/// Default plant sample interval, 50 Hz.
pub const DEFAULT_DT: f64 = 0.02;
/// Default vehicle mass without payload, kg.
pub const DEFAULT_NOMINAL_MASS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PlantError {
    #[error("non-finite numeric input: {0}")]
    NonFinite(&'static str),
    #[error("invalid configuration: {0}")]
    Config(&'static str),
    #[error("input sampled at {input} s but simulation step is {dt} s")]
    Format { input: f64, dt: f64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// One axis of the stabilized vehicle, `G(s) = K / (1 + tau s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderModel {
    gain_k: f64,
    tau: f64,
}

impl FirstOrderModel {
    /// X/Y axis model identified on the vendor simulator.
    pub const PAPER_XY: FirstOrderModel = FirstOrderModel {
        gain_k: 1.16,
        tau: 0.75,
    };
    /// Z axis model identified on the vendor simulator.
    pub const PAPER_Z: FirstOrderModel = FirstOrderModel {
        gain_k: 0.98,
        tau: 0.30,
    };

    pub fn new(gain_k: f64, tau: f64) -> Result<Self, PlantError> {
        if !gain_k.is_finite() || !tau.is_finite() {
            return Err(PlantError::NonFinite("model parameters"));
        }
        if gain_k <= 0.0 {
            return Err(PlantError::Config("gain must be positive"));
        }
        if tau <= 0.0 {
            return Err(PlantError::Config("time constant must be positive"));
        }
        Ok(Self { gain_k, tau })
    }

    pub fn gain(&self) -> f64 {
        self.gain_k
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// State coefficient of `v' = A v + B u`, i.e. `-1 / tau`.
    pub fn state_coeff(&self) -> f64 {
        -1.0 / self.tau
    }

    /// Input coefficient of `v' = A v + B u`, i.e. `K / tau`.
    pub fn input_coeff(&self) -> f64 {
        self.gain_k / self.tau
    }

    /// Zero-order-hold pole `exp(-dt / tau)`.
    pub fn zoh_pole(&self, dt: f64) -> f64 {
        (-dt / self.tau).exp()
    }

    /// `|G(j omega)|`.
    pub fn magnitude(&self, omega: f64) -> f64 {
        self.gain_k / (1.0 + (self.tau * omega).powi(2)).sqrt()
    }

    /// Same model with a different time constant.
    pub fn with_tau(&self, tau: f64) -> Result<Self, PlantError> {
        Self::new(self.gain_k, tau)
    }

    pub fn with_gain(&self, gain_k: f64) -> Result<Self, PlantError> {
        Self::new(gain_k, self.tau)
    }

    /// Scales both parameters, used for robustness grids.
    pub fn scaled(&self, gain_factor: f64, tau_factor: f64) -> Result<Self, PlantError> {
        Self::new(self.gain_k * gain_factor, self.tau * tau_factor)
    }
}

/// Per-axis state. `velocity` is the airframe velocity tracked by the
/// stabilizer; the ground velocity additionally carries the wind.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AxisState {
    pub velocity: f64,
    pub position: f64,
}

impl AxisState {
    pub fn at(position: f64) -> Self {
        Self {
            velocity: 0.0,
            position,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.velocity.is_finite() && self.position.is_finite()
    }
}

/// Command velocity limits, m/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationLimits {
    max_xy_cmd: f64,
    max_z_cmd: f64,
}

impl SaturationLimits {
    pub const DEFAULT: SaturationLimits = SaturationLimits {
        max_xy_cmd: 5.0,
        max_z_cmd: 3.0,
    };

    pub fn new(max_xy_cmd: f64, max_z_cmd: f64) -> Result<Self, PlantError> {
        if !(max_xy_cmd > 0.0 && max_z_cmd > 0.0) {
            return Err(PlantError::Config("saturation limits must be positive"));
        }
        if !max_xy_cmd.is_finite() || !max_z_cmd.is_finite() {
            return Err(PlantError::NonFinite("saturation limits"));
        }
        Ok(Self {
            max_xy_cmd,
            max_z_cmd,
        })
    }

    pub fn xy(&self) -> f64 {
        self.max_xy_cmd
    }

    pub fn z(&self) -> f64 {
        self.max_z_cmd
    }

    pub fn for_axis(&self, axis: usize) -> f64 {
        if axis == 2 {
            self.max_z_cmd
        } else {
            self.max_xy_cmd
        }
    }
}

impl Default for SaturationLimits {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub fn apply_saturation(u_cmd: f64, limit: f64) -> f64 {
    u_cmd.clamp(-limit, limit)
}

/// Advances one axis by `dt` under a command held constant over the step.
///
/// Velocity uses the exact zero-order-hold solution of the first-order lag;
/// position integrates the ground velocity (airframe velocity plus wind)
/// with the trapezoidal rule. The command is applied as given, saturation is
/// the caller's job.
pub fn step_axis(
    model: &FirstOrderModel,
    state: AxisState,
    u_cmd: f64,
    wind_vel: f64,
    dt: f64,
) -> Result<AxisState, PlantError> {
    if !(u_cmd.is_finite() && wind_vel.is_finite() && dt.is_finite() && state.is_finite()) {
        return Err(PlantError::NonFinite("step input"));
    }
    if dt <= 0.0 {
        return Err(PlantError::Config("time step must be positive"));
    }
    if dt > model.tau / 5.0 * (1.0 + 1e-12) {
        return Err(PlantError::Config("time step exceeds tau / 5"));
    }
    let a = model.zoh_pole(dt);
    let velocity = a * state.velocity + (1.0 - a) * model.gain_k * u_cmd;
    let position =
        state.position + 0.5 * dt * ((state.velocity + wind_vel) + (velocity + wind_vel));
    Ok(AxisState { velocity, position })
}

/// Something that maps a command-velocity record to a velocity record.
///
/// Stands in for the vendor's hardware-in-loop simulator during
/// identification.
pub trait VelocityResponse {
    fn respond(&self, input: &TimeSeries) -> Result<TimeSeries, PlantError>;
}

/// Drives `model` from rest with `input`, returning the velocity record.
///
/// `output[0]` is the initial velocity (zero); `input[k]` is held over
/// `[t_k, t_k+1)`.
pub fn simulate_open_loop(
    model: &FirstOrderModel,
    input: &TimeSeries,
    dt: f64,
) -> Result<TimeSeries, PlantError> {
    if !same_interval(input.dt(), dt) {
        return Err(PlantError::Format {
            input: input.dt(),
            dt,
        });
    }
    let mut state = AxisState::default();
    let mut out = alloc::vec::Vec::with_capacity(input.len());
    out.push(state.velocity);
    for &u in &input.values()[..input.len() - 1] {
        state = step_axis(model, state, u, 0.0, dt)?;
        out.push(state.velocity);
    }
    Ok(TimeSeries::new(dt, input.start_time(), out)?)
}

impl VelocityResponse for FirstOrderModel {
    fn respond(&self, input: &TimeSeries) -> Result<TimeSeries, PlantError> {
        simulate_open_loop(self, input, input.dt())
    }
}

/// Returns the model as it behaves with `payload` kg on board.
///
/// Time constant grows and gain shrinks with the mass ratio
/// `(mass_nominal + payload) / mass_nominal`.
pub fn perturb_for_mass(
    model: &FirstOrderModel,
    mass_nominal: f64,
    payload: f64,
) -> Result<FirstOrderModel, PlantError> {
    if !(mass_nominal.is_finite() && payload.is_finite()) {
        return Err(PlantError::NonFinite("mass"));
    }
    if mass_nominal <= 0.0 {
        return Err(PlantError::Config("nominal mass must be positive"));
    }
    if payload < 0.0 {
        return Err(PlantError::Config("payload must be non-negative"));
    }
    if payload == 0.0 {
        return Ok(*model);
    }
    let ratio = (mass_nominal + payload) / mass_nominal;
    FirstOrderModel::new(model.gain_k / ratio, model.tau * ratio)
}

/// Mean wind plus first-order Gauss-Markov gusts on each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindModel {
    pub mean_velocity: Vec3,
    pub gust_std: f64,
    /// Gust corner frequency, rad/s.
    pub gust_bandwidth: f64,
    pub seed: u64,
}

impl WindModel {
    /// 5 km/h along +X.
    pub const PAPER_MEAN_SPEED: f64 = 5.0 / 3.6;

    pub fn calm() -> Self {
        Self {
            mean_velocity: [0.0; 3],
            gust_std: 0.0,
            gust_bandwidth: 1.0,
            seed: 0,
        }
    }

    /// Field-test wind: 5 km/h mean along X with moderate gusts.
    pub fn paper_field(seed: u64) -> Self {
        Self {
            mean_velocity: [Self::PAPER_MEAN_SPEED, 0.0, 0.0],
            gust_std: 0.25,
            gust_bandwidth: 0.5,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), PlantError> {
        if !self.mean_velocity.iter().all(|v| v.is_finite())
            || !self.gust_std.is_finite()
            || !self.gust_bandwidth.is_finite()
        {
            return Err(PlantError::NonFinite("wind parameters"));
        }
        if self.gust_std < 0.0 {
            return Err(PlantError::Config("gust std must be non-negative"));
        }
        if self.gust_bandwidth <= 0.0 {
            return Err(PlantError::Config("gust bandwidth must be positive"));
        }
        Ok(())
    }
}

/// Running wind realisation: the model, the gust state and its RNG.
///
/// Same seed and same sequence of `sample` calls give bit-identical output.
#[derive(Debug, Clone)]
pub struct WindProcess {
    model: WindModel,
    gust: Vec3,
    rng: ChaCha8Rng,
}

impl WindProcess {
    pub fn new(model: WindModel) -> Result<Self, PlantError> {
        model.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
        // start in the stationary distribution
        let mut gust = [0.0; 3];
        for g in &mut gust {
            let n: f64 = StandardNormal.sample(&mut rng);
            *g = model.gust_std * n;
        }
        Ok(Self { model, gust, rng })
    }

    pub fn model(&self) -> &WindModel {
        &self.model
    }

    /// Advances the gusts by `dt` and returns the total wind velocity.
    pub fn sample(&mut self, dt: f64) -> Vec3 {
        let phi = (-self.model.gust_bandwidth * dt).exp();
        let drive = self.model.gust_std * (1.0 - phi * phi).sqrt();
        let mut out = [0.0; 3];
        for axis in 0..3 {
            let n: f64 = StandardNormal.sample(&mut self.rng);
            self.gust[axis] = phi * self.gust[axis] + drive * n;
            out[axis] = self.model.mean_velocity[axis] + self.gust[axis];
        }
        out
    }
}

/// Free-function form of [`WindProcess::sample`].
pub fn sample_wind(process: &mut WindProcess, dt: f64) -> Vec3 {
    process.sample(dt)
}

/// Three decoupled axes plus limits, wind and payload.
#[derive(Debug, Clone)]
pub struct UavPlant {
    nominal: [FirstOrderModel; 3],
    effective: [FirstOrderModel; 3],
    states: [AxisState; 3],
    limits: SaturationLimits,
    wind: Option<WindProcess>,
    wind_now: Vec3,
    mass_nominal: f64,
    payload: f64,
}

impl UavPlant {
    pub fn new(
        model_xy: FirstOrderModel,
        model_z: FirstOrderModel,
        limits: SaturationLimits,
    ) -> Self {
        let models = [model_xy, model_xy, model_z];
        Self {
            nominal: models,
            effective: models,
            states: [AxisState::default(); 3],
            limits,
            wind: None,
            wind_now: [0.0; 3],
            mass_nominal: DEFAULT_NOMINAL_MASS,
            payload: 0.0,
        }
    }

    /// Both identified models with default limits, no wind, no payload.
    pub fn paper_nominal() -> Self {
        Self::new(
            FirstOrderModel::PAPER_XY,
            FirstOrderModel::PAPER_Z,
            SaturationLimits::DEFAULT,
        )
    }

    pub fn with_models(mut self, models: [FirstOrderModel; 3]) -> Result<Self, PlantError> {
        self.nominal = models;
        self.refresh_effective()?;
        Ok(self)
    }

    pub fn with_mass(mut self, mass_nominal: f64, payload: f64) -> Result<Self, PlantError> {
        self.mass_nominal = mass_nominal;
        self.payload = payload;
        self.refresh_effective()?;
        Ok(self)
    }

    pub fn with_wind(mut self, wind: WindModel) -> Result<Self, PlantError> {
        let mut process = WindProcess::new(wind)?;
        self.wind_now = process.sample(0.0);
        self.wind = Some(process);
        Ok(self)
    }

    pub fn with_position(mut self, position: Vec3) -> Self {
        for (state, p) in self.states.iter_mut().zip(position) {
            *state = AxisState::at(p);
        }
        self
    }

    fn refresh_effective(&mut self) -> Result<(), PlantError> {
        for (eff, nom) in self.effective.iter_mut().zip(&self.nominal) {
            *eff = perturb_for_mass(nom, self.mass_nominal, self.payload)?;
        }
        Ok(())
    }

    /// Models before the payload perturbation.
    pub fn nominal_models(&self) -> &[FirstOrderModel; 3] {
        &self.nominal
    }

    /// Models the simulation actually runs.
    pub fn models(&self) -> &[FirstOrderModel; 3] {
        &self.effective
    }

    pub fn limits(&self) -> &SaturationLimits {
        &self.limits
    }

    pub fn states(&self) -> &[AxisState; 3] {
        &self.states
    }

    pub fn mass_nominal(&self) -> f64 {
        self.mass_nominal
    }

    pub fn payload(&self) -> f64 {
        self.payload
    }

    pub fn wind_model(&self) -> Option<&WindModel> {
        self.wind.as_ref().map(|w| w.model())
    }

    /// Wind acting over the next step.
    pub fn current_wind(&self) -> Vec3 {
        self.wind_now
    }

    pub fn position(&self) -> Vec3 {
        [
            self.states[0].position,
            self.states[1].position,
            self.states[2].position,
        ]
    }

    /// Velocity over ground as an onboard estimator would report it.
    pub fn ground_velocity(&self) -> Vec3 {
        [
            self.states[0].velocity + self.wind_now[0],
            self.states[1].velocity + self.wind_now[1],
            self.states[2].velocity + self.wind_now[2],
        ]
    }

    /// Saturates `cmd`, advances every axis by `dt` and draws the next wind
    /// sample. Returns the saturated command actually applied.
    pub fn step(&mut self, cmd: Vec3, dt: f64) -> Result<Vec3, PlantError> {
        let mut applied = [0.0; 3];
        let mut next = self.states;
        for axis in 0..3 {
            if !cmd[axis].is_finite() {
                return Err(PlantError::NonFinite("command"));
            }
            applied[axis] = apply_saturation(cmd[axis], self.limits.for_axis(axis));
            next[axis] = step_axis(
                &self.effective[axis],
                self.states[axis],
                applied[axis],
                self.wind_now[axis],
                dt,
            )?;
        }
        self.states = next;
        if let Some(wind) = self.wind.as_mut() {
            self.wind_now = wind.sample(dt);
        }
        Ok(applied)
    }
}

/// Lightly damped second-order mode with transfer function
/// `2 zeta omega s / (s^2 + 2 zeta omega s + omega^2)`, scaled by `coupling`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderMode {
    pub natural_freq: f64,
    pub damping: f64,
    pub coupling: f64,
}

/// A first-order lag with an actuator mode excited by the lag's rate and
/// added to its output, and an optional acceleration limit on the lag.
///
/// The mode leaves the DC gain and the initial slope of a step response
/// untouched but adds a damped overshoot, which a first-order fit cannot
/// follow; used as a stand-in for real vehicle data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentedPlant {
    pub base: FirstOrderModel,
    pub mode: SecondOrderMode,
    pub accel_limit: Option<f64>,
}

impl AugmentedPlant {
    /// Roughly 10% step overshoot around the X/Y gain.
    pub const OVERSHOOT_XY: AugmentedPlant = AugmentedPlant {
        base: FirstOrderModel {
            gain_k: 1.16,
            tau: 0.3,
        },
        mode: SecondOrderMode {
            natural_freq: 6.0,
            damping: 0.5,
            coupling: 1.0,
        },
        accel_limit: Some(6.0),
    };

    const SUBSTEPS: usize = 10;

    // state: lag output, mode displacement, mode rate
    fn derivative(&self, x: [f64; 3], u: f64) -> [f64; 3] {
        let mut lag_rate = (self.base.gain_k * u - x[0]) / self.base.tau;
        if let Some(limit) = self.accel_limit {
            lag_rate = lag_rate.clamp(-limit, limit);
        }
        let w = self.mode.natural_freq;
        let zw2 = 2.0 * self.mode.damping * w;
        let accel = zw2 * (lag_rate - x[2]) - w * w * x[1];
        [lag_rate, x[2], accel]
    }

    fn output(&self, x: &[f64; 3]) -> f64 {
        x[0] + self.mode.coupling * x[1]
    }
}

impl VelocityResponse for AugmentedPlant {
    fn respond(&self, input: &TimeSeries) -> Result<TimeSeries, PlantError> {
        let h = input.dt() / Self::SUBSTEPS as f64;
        let mut x = [0.0; 3];
        let mut out = alloc::vec::Vec::with_capacity(input.len());
        out.push(self.output(&x));
        let add = |a: [f64; 3], b: [f64; 3], s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
        for &u in &input.values()[..input.len() - 1] {
            for _ in 0..Self::SUBSTEPS {
                let k1 = self.derivative(x, u);
                let k2 = self.derivative(add(x, k1, h / 2.0), u);
                let k3 = self.derivative(add(x, k2, h / 2.0), u);
                let k4 = self.derivative(add(x, k3, h), u);
                for i in 0..3 {
                    x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
            out.push(self.output(&x));
        }
        Ok(TimeSeries::new(input.dt(), input.start_time(), out)?)
    }
}
