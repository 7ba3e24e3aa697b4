//! CSV artifacts and the identified-model report.
//!
//! Numbers are written with Rust's shortest round-trip formatting so that
//! identical runs give byte-identical files.

use std::fs;
use std::path::Path;

use brickfly_core::nav::{ComparisonReport, RunMetrics, Trajectory};
use brickfly_core::sysid::{IdentifiedModel, MagnitudePoint, SweepRecord, ValidationReport};
use brickfly_core::{FirstOrderModel, TimeSeries};
use serde::{Deserialize, Serialize};

use crate::config::Axis;
use crate::error::CliError;

fn writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv {
        path: path.display().to_string(),
        source,
    }
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = writer(path)?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `t,value`
pub fn write_series(path: &Path, ts: &TimeSeries) -> Result<(), CliError> {
    write_rows(
        path,
        &["t", "value"],
        ts.iter().map(|(t, v)| [t.to_string(), v.to_string()]),
    )
}

/// Reads a `t,value` file; the interval is taken from the first two rows.
pub fn read_series(path: &Path) -> Result<TimeSeries, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for row in r.deserialize::<(f64, f64)>() {
        let (t, v) = row.map_err(csv_err(path))?;
        times.push(t);
        values.push(v);
    }
    if times.len() < 2 {
        return Err(CliError::Config(format!("{}: fewer than two samples", path.display())));
    }
    let dt = times[1] - times[0];
    TimeSeries::new(dt, times[0], values)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// `omega,mag_db`
pub fn write_bode(path: &Path, bode: &[MagnitudePoint]) -> Result<(), CliError> {
    write_rows(
        path,
        &["omega", "mag_db"],
        bode.iter()
            .map(|p| [p.omega.to_string(), p.mag_db.to_string()]),
    )
}

/// `omega_in,omega_out`
pub fn write_spectral(path: &Path, records: &[SweepRecord]) -> Result<(), CliError> {
    write_rows(
        path,
        &["omega_in", "omega_out"],
        records
            .iter()
            .map(|r| [r.omega.to_string(), r.peak_omega.to_string()]),
    )
}

/// `amplitude,mapd_percent`; undefined results leave the value empty.
pub fn write_mapd(path: &Path, report: &ValidationReport) -> Result<(), CliError> {
    write_rows(
        path,
        &["amplitude", "mapd_percent"],
        report
            .records
            .iter()
            .map(|r| [r.amplitude.to_string(), opt(r.mapd.ok())]),
    )
}

/// `t,x,y,z,vx,vy,vz,ux,uy,uz,wind_x,wind_y,wind_z,phase`
pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let header = [
        "t", "x", "y", "z", "vx", "vy", "vz", "ux", "uy", "uz", "wind_x", "wind_y", "wind_z",
        "phase",
    ];
    write_rows(
        path,
        &header,
        traj.samples.iter().map(|s| {
            let mut row = Vec::with_capacity(header.len());
            row.push(s.t.to_string());
            for group in [&s.position, &s.velocity, &s.command, &s.wind] {
                row.extend(group.iter().map(f64::to_string));
            }
            row.push(s.phase.as_str().to_string());
            row
        }),
    )
}

fn metrics_row(name: &str, m: &RunMetrics, dev: &[f64; 3]) -> Vec<String> {
    vec![
        name.to_string(),
        m.success.to_string(),
        opt(m.settle_time),
        opt(m.land_time),
        dev[0].to_string(),
        dev[1].to_string(),
        dev[2].to_string(),
        m.max_deviation.to_string(),
        m.effort_rms.to_string(),
    ]
}

/// One row per controller.
pub fn write_comparison(path: &Path, report: &ComparisonReport) -> Result<(), CliError> {
    write_rows(
        path,
        &[
            "controller",
            "success",
            "settle_time",
            "land_time",
            "max_dev_x",
            "max_dev_y",
            "max_dev_z",
            "max_deviation",
            "effort_rms",
        ],
        [
            metrics_row("smc", &report.smc_metrics, &report.smc.max_dev_after_settle),
            metrics_row("pd", &report.pd_metrics, &report.pd.max_dev_after_settle),
        ],
    )
}

/// What `sysid` found, in a form `validate` can read back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub axis: Axis,
    pub gain_k: f64,
    pub tau: f64,
    pub low_freq_gain: f64,
    pub tau_cutoff: f64,
    pub tau_range: [f64; 2],
    pub slope_db_per_decade: f64,
    pub fit_sse: f64,
    pub mean_freq_deviation: f64,
}

impl ModelReport {
    pub fn new(axis: Axis, id: &IdentifiedModel) -> Self {
        Self {
            axis,
            gain_k: id.model.gain(),
            tau: id.model.tau(),
            low_freq_gain: id.low_freq_gain,
            tau_cutoff: id.tau_range.tau,
            tau_range: [id.tau_range.lower, id.tau_range.upper],
            slope_db_per_decade: id.slope_high_db_per_decade,
            fit_sse: id.fit_sse,
            mean_freq_deviation: id.lti_freq_deviation,
        }
    }

    pub fn model(&self) -> Result<FirstOrderModel, CliError> {
        FirstOrderModel::new(self.gain_k, self.tau).map_err(CliError::from_plant)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = toml::to_string(self).expect("report serializes");
        fs::write(path, text).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("model file {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("model file {}: {e}", path.display())))
    }
}
