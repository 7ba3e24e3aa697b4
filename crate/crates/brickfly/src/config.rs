//! Experiment configuration.
//!
//! A config file is TOML. It names a base preset (`paper-nominal` when
//! omitted) and overrides any of its keys; the merged table must then
//! describe a complete experiment. One file fully determines a run.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use brickfly_core::sysid::SweepSpec;
use brickfly_core::{
    AugmentedPlant, ControllerSet, FirstOrderModel, Mission, PdParams, SaturationLimits,
    SecondOrderMode, SmcParams, UavPlant, Vec3, WindModel,
};
use serde::{Deserialize, Serialize};
use toml::Table;

use crate::error::CliError;

const PAPER_NOMINAL: &str = include_str!("../presets/paper-nominal.toml");
const LADEN: &str = include_str!("../presets/laden.toml");
const UNLADEN: &str = include_str!("../presets/unladen.toml");

/// Names accepted by the `preset` key.
pub const PRESETS: [&str; 3] = ["paper-nominal", "laden", "unladen"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["x", "y", "z"][self.index()])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ControllerKind {
    Smc,
    Pd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlantKind {
    FirstOrder,
    Overshoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisModel {
    pub k: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub xy: AxisModel,
    pub z: AxisModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OvershootSection {
    pub tau: f64,
    pub natural_freq: f64,
    pub damping: f64,
    pub coupling: f64,
    pub accel_limit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSection {
    pub kind: PlantKind,
    pub overshoot: OvershootSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsSection {
    pub xy: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindSection {
    pub enabled: bool,
    pub mean: Vec3,
    pub gust_std: f64,
    pub gust_bandwidth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassSection {
    pub nominal: f64,
    pub payload: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmcGains {
    pub lambda: f64,
    pub k_reach: f64,
    pub q: f64,
    pub boundary_layer: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmcSection {
    pub xy: SmcGains,
    pub z: SmcGains,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdGains {
    pub k_p: f64,
    pub k_d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdSection {
    pub xy: PdGains,
    pub z: PdGains,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MissionSection {
    pub controller: ControllerKind,
    pub target: Vec3,
    pub band_half_width: f64,
    pub hold_duration: f64,
    pub min_op_height: f64,
    pub timeout: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: Axis,
    pub omega_low: f64,
    pub omega_high: f64,
    pub points: usize,
    pub amplitude: f64,
    pub cycles_per_point: u32,
    pub settle_cycles: u32,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSection {
    pub axis: Axis,
    pub amplitudes: Vec<f64>,
    pub duration: f64,
    pub dt: f64,
    /// Identified-model report written by `sysid`; the configured model
    /// for `axis` is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub model: ModelSection,
    pub plant: PlantSection,
    pub limits: LimitsSection,
    pub wind: WindSection,
    pub mass: MassSection,
    pub smc: SmcSection,
    pub pd: PdSection,
    pub mission: MissionSection,
    pub sweep: SweepSection,
    pub validate: ValidateSection,
}

fn parse_table(text: &str, origin: &str) -> Result<Table, CliError> {
    text.parse::<Table>()
        .map_err(|e| CliError::Config(format!("{origin}: {e}")))
}

/// Recursively overlays `top` onto `base`; tables merge, anything else
/// replaces.
fn merge(base: &mut Table, top: Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

/// The fully expanded table of a named preset.
pub fn preset_table(name: &str) -> Result<Table, CliError> {
    let mut table = parse_table(PAPER_NOMINAL, "preset paper-nominal")?;
    let overlay = match name {
        "paper-nominal" => None,
        "laden" => Some(LADEN),
        "unladen" => Some(UNLADEN),
        other => {
            return Err(CliError::Config(format!(
                "unknown preset `{other}` (expected one of {})",
                PRESETS.join(", ")
            )))
        }
    };
    if let Some(text) = overlay {
        merge(&mut table, parse_table(text, name)?);
    }
    Ok(table)
}

fn finite(name: &str, values: &[f64]) -> Result<(), CliError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name}: values must be finite")))
    }
}

impl ExperimentConfig {
    pub fn preset(name: &str) -> Result<Self, CliError> {
        Self::from_table(preset_table(name)?, &format!("preset {name}"))
    }

    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let top = parse_table(text, "config")?;
        let name = match top.get("preset") {
            None => "paper-nominal",
            Some(toml::Value::String(s)) => s.as_str(),
            Some(_) => return Err(CliError::Config("preset must be a string".into())),
        };
        let mut table = preset_table(name)?;
        merge(&mut table, top);
        Self::from_table(table, "config")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    fn from_table(table: Table, origin: &str) -> Result<Self, CliError> {
        let cfg: Self = table
            .try_into()
            .map_err(|e| CliError::Config(format!("{origin}: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks everything that can be checked without running anything.
    pub fn validate(&self) -> Result<(), CliError> {
        self.models()?;
        self.limits()?;
        self.mission()?;
        self.sweep_spec()?;
        self.smc_controllers()?;
        self.pd_controllers()?;
        self.wind_model().validate().map_err(CliError::from_plant)?;
        self.uav_plant()?;
        self.black_box(self.sweep.axis)?;
        let v = &self.validate;
        finite("validate", &[v.duration, v.dt])?;
        finite("validate.amplitudes", &v.amplitudes)?;
        if v.amplitudes.is_empty() {
            return Err(CliError::Config("validate.amplitudes is empty".into()));
        }
        if !(v.duration > 0.0 && v.dt > 0.0) {
            return Err(CliError::Config(
                "validate.duration and validate.dt must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Nominal X/Y and Z models.
    pub fn models(&self) -> Result<(FirstOrderModel, FirstOrderModel), CliError> {
        let build = |m: &AxisModel| FirstOrderModel::new(m.k, m.tau).map_err(CliError::from_plant);
        Ok((build(&self.model.xy)?, build(&self.model.z)?))
    }

    pub fn axis_model(&self, axis: Axis) -> Result<FirstOrderModel, CliError> {
        let (xy, z) = self.models()?;
        Ok(if axis == Axis::Z { z } else { xy })
    }

    pub fn limits(&self) -> Result<SaturationLimits, CliError> {
        SaturationLimits::new(self.limits.xy, self.limits.z).map_err(CliError::from_plant)
    }

    pub fn wind_model(&self) -> WindModel {
        WindModel {
            mean_velocity: self.wind.mean,
            gust_std: self.wind.gust_std,
            gust_bandwidth: self.wind.gust_bandwidth,
            seed: self.seed,
        }
    }

    /// The simulated vehicle for missions, with payload and wind applied.
    pub fn uav_plant(&self) -> Result<UavPlant, CliError> {
        let (xy, z) = self.models()?;
        let plant = UavPlant::new(xy, z, self.limits()?)
            .with_mass(self.mass.nominal, self.mass.payload)
            .map_err(CliError::from_plant)?;
        if self.wind.enabled {
            plant.with_wind(self.wind_model()).map_err(CliError::from_plant)
        } else {
            Ok(plant)
        }
    }

    /// The plant probed by `sysid` and `validate` on one axis.
    pub fn black_box(&self, axis: Axis) -> Result<BlackBox, CliError> {
        let nominal = self.axis_model(axis)?;
        let model = brickfly_core::perturb_for_mass(&nominal, self.mass.nominal, self.mass.payload)
            .map_err(CliError::from_plant)?;
        match self.plant.kind {
            PlantKind::FirstOrder => Ok(BlackBox::FirstOrder(model)),
            PlantKind::Overshoot => {
                let o = &self.plant.overshoot;
                finite(
                    "plant.overshoot",
                    &[o.natural_freq, o.damping, o.coupling, o.accel_limit],
                )?;
                if !(o.natural_freq > 0.0 && o.damping > 0.0 && o.accel_limit > 0.0) {
                    return Err(CliError::Config(
                        "plant.overshoot parameters must be positive".into(),
                    ));
                }
                Ok(BlackBox::Overshoot(AugmentedPlant {
                    base: model.with_tau(o.tau).map_err(CliError::from_plant)?,
                    mode: SecondOrderMode {
                        natural_freq: o.natural_freq,
                        damping: o.damping,
                        coupling: o.coupling,
                    },
                    accel_limit: Some(o.accel_limit),
                }))
            }
        }
    }

    pub fn smc_controllers(&self) -> Result<ControllerSet, CliError> {
        let build = |g: &SmcGains| {
            SmcParams::new(g.lambda, g.k_reach, g.q, g.boundary_layer)
                .map_err(|e| CliError::Config(format!("smc: {e}")))
        };
        let (xy, z) = self.models()?;
        Ok(ControllerSet::smc(build(&self.smc.xy)?, build(&self.smc.z)?, xy, z))
    }

    pub fn pd_controllers(&self) -> Result<ControllerSet, CliError> {
        let build = |g: &PdGains| {
            PdParams::new(g.k_p, g.k_d).map_err(|e| CliError::Config(format!("pd: {e}")))
        };
        Ok(ControllerSet::pd(build(&self.pd.xy)?, build(&self.pd.z)?))
    }

    pub fn controllers(&self, kind: ControllerKind) -> Result<ControllerSet, CliError> {
        match kind {
            ControllerKind::Smc => self.smc_controllers(),
            ControllerKind::Pd => self.pd_controllers(),
        }
    }

    pub fn mission(&self) -> Result<Mission, CliError> {
        let m = &self.mission;
        let mission = Mission {
            target: m.target,
            band_half_width: m.band_half_width,
            hold_duration: m.hold_duration,
            min_op_height: m.min_op_height,
            timeout: m.timeout,
            dt: m.dt,
        };
        mission
            .validate()
            .map_err(|e| CliError::Config(format!("mission: {e}")))?;
        Ok(mission)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec, CliError> {
        let s = &self.sweep;
        finite("sweep", &[s.omega_low, s.omega_high, s.amplitude, s.dt])?;
        if s.dt <= 0.0 {
            return Err(CliError::Config("sweep.dt must be positive".into()));
        }
        let spec = if s.points == 1 {
            SweepSpec::new(vec![s.omega_low], s.amplitude, s.cycles_per_point, s.settle_cycles)
        } else {
            SweepSpec::log_spaced(s.omega_low, s.omega_high, s.points, s.amplitude).and_then(
                |grid| {
                    SweepSpec::new(
                        grid.omegas().to_vec(),
                        s.amplitude,
                        s.cycles_per_point,
                        s.settle_cycles,
                    )
                },
            )
        };
        spec.map_err(|e| CliError::Config(format!("sweep: {e}")))
    }
}

/// A plant seen only through its velocity response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlackBox {
    FirstOrder(FirstOrderModel),
    Overshoot(AugmentedPlant),
}

impl brickfly_core::VelocityResponse for BlackBox {
    fn respond(
        &self,
        input: &brickfly_core::TimeSeries,
    ) -> Result<brickfly_core::TimeSeries, brickfly_core::PlantError> {
        match self {
            BlackBox::FirstOrder(m) => m.respond(input),
            BlackBox::Overshoot(p) => p.respond(input),
        }
    }
}
