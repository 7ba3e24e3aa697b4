//! The four workflow commands plus the PD tuning helper.
//!
//! Each command writes its artifacts into the output directory and returns
//! an [`Outcome`] with a printable summary and the process exit code.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use brickfly_core::nav::{compare_controllers, run_mission, tune_pd_heuristic, MissionResult};
use brickfly_core::sysid::{
    identify_from_records, step_records, sweep_point, validate_step, SweepRecord, SysidError,
};
use rayon::prelude::*;

use crate::config::{Axis, ControllerKind, ExperimentConfig};
use crate::error::CliError;
use crate::io::{self, ModelReport};

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Worker threads for independent sweep points and step records.
    pub jobs: usize,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            out_dir: out_dir.into(),
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: u8,
    pub summary: String,
    pub artifacts: Vec<PathBuf>,
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("--jobs: {e}")))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Sweeps one axis of the configured black box and identifies it.
///
/// `bode.csv` and `spectral.csv` are written before identification so they
/// are available even when no model can be extracted.
pub fn sysid(cfg: &ExperimentConfig, axis: Axis, opts: &RunOptions) -> Result<Outcome, CliError> {
    let spec = cfg.sweep_spec()?;
    let source = cfg.black_box(axis)?;
    let dt = cfg.sweep.dt;
    prepare_dir(&opts.out_dir)?;

    let records: Vec<SweepRecord> = pool(opts.jobs)?
        .install(|| {
            spec.omegas()
                .par_iter()
                .map(|&w| sweep_point(&source, w, &spec, dt))
                .collect::<Result<_, SysidError>>()
        })
        .map_err(CliError::from_sysid)?;

    let bode_path = opts.out_dir.join("bode.csv");
    let spectral_path = opts.out_dir.join("spectral.csv");
    let bode: Vec<_> = records.iter().map(|r| r.magnitude).collect();
    io::write_bode(&bode_path, &bode)?;
    io::write_spectral(&spectral_path, &records)?;

    let id = identify_from_records(&records).map_err(CliError::from_sysid)?;
    let report = ModelReport::new(axis, &id);
    let report_path = opts.out_dir.join("identified_model.toml");
    report.write(&report_path)?;

    let mut summary = String::new();
    let _ = writeln!(summary, "axis {axis}");
    let _ = writeln!(summary, "K = {:.4}", report.gain_k);
    let _ = writeln!(
        summary,
        "tau = {:.4} s (cutoff {:.4} s, range [{:.4}, {:.4}] s)",
        report.tau, report.tau_cutoff, report.tau_range[0], report.tau_range[1]
    );
    let _ = writeln!(summary, "high-frequency slope = {:.2} dB/decade", report.slope_db_per_decade);
    let _ = writeln!(summary, "mean |omega_out - omega_in| = {:.2e} rad/s", report.mean_freq_deviation);
    Ok(Outcome {
        exit_code: CliError::EXIT_OK,
        summary,
        artifacts: vec![bode_path, spectral_path, report_path],
    })
}

/// Compares step responses of the black box with a first-order model.
pub fn validate(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let v = &cfg.validate;
    let model = match &v.model_file {
        Some(path) => ModelReport::read(path)?.model()?,
        None => cfg.axis_model(v.axis)?,
    };
    let source = cfg.black_box(v.axis)?;
    prepare_dir(&opts.out_dir)?;

    let records = pool(opts.jobs)?
        .install(|| {
            v.amplitudes
                .par_iter()
                .map(|&a| step_records(&source, &[a], v.duration, v.dt))
                .collect::<Result<Vec<_>, SysidError>>()
        })
        .map_err(CliError::from_sysid)?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    let report = validate_step(&model, &records);

    let mapd_path = opts.out_dir.join("mapd.csv");
    io::write_mapd(&mapd_path, &report)?;
    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "model K = {:.4}, tau = {:.4} s on axis {}",
        model.gain(),
        model.tau(),
        v.axis
    );
    for r in &report.records {
        match &r.mapd {
            Ok(d) => {
                let _ = writeln!(summary, "step {:>5} m/s: MAPD {:.3} %", r.amplitude, d);
            }
            Err(e) => {
                let _ = writeln!(summary, "step {:>5} m/s: {e}", r.amplitude);
            }
        }
    }
    if let (Some(mean), Some(max)) = (report.mean_mapd(), report.max_mapd()) {
        let _ = writeln!(summary, "mean MAPD {mean:.3} %, max MAPD {max:.3} %");
    }
    let summary_path = opts.out_dir.join("validate_summary.txt");
    write_text(&summary_path, &summary)?;

    if let Some((amplitude, e)) = report.first_error() {
        let err = CliError::from_sysid(e);
        return Err(match err {
            CliError::UndefinedMetric(msg) => {
                CliError::UndefinedMetric(format!("step amplitude {amplitude}: {msg}"))
            }
            other => other,
        });
    }
    Ok(Outcome {
        exit_code: CliError::EXIT_OK,
        summary,
        artifacts: vec![mapd_path, summary_path],
    })
}

fn mission_summary(label: &str, r: &MissionResult) -> String {
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |t| format!("{t:.2} s"));
    let d = r.max_dev_after_settle;
    format!(
        "{label}: {}, settle {}, land {}, max deviation ({:.4}, {:.4}, {:.4}) m\n",
        if r.success { "success" } else { "FAILED" },
        fmt(r.settle_time),
        fmt(r.land_time),
        d[0],
        d[1],
        d[2],
    )
}

/// Flies one mission; exit code 5 when the band is never held.
pub fn navigate(
    cfg: &ExperimentConfig,
    controller: ControllerKind,
    opts: &RunOptions,
) -> Result<Outcome, CliError> {
    let mission = cfg.mission()?;
    let controllers = cfg.controllers(controller)?;
    let plant = cfg.uav_plant()?;
    prepare_dir(&opts.out_dir)?;

    let result = run_mission(plant, &controllers, &mission).map_err(CliError::from_nav)?;
    let traj_path = opts.out_dir.join("trajectory.csv");
    io::write_trajectory(&traj_path, &result.trajectory)?;
    let label = match controller {
        ControllerKind::Smc => "smc",
        ControllerKind::Pd => "pd",
    };
    let summary = mission_summary(label, &result);
    let summary_path = opts.out_dir.join("mission_summary.txt");
    write_text(&summary_path, &summary)?;
    Ok(Outcome {
        exit_code: if result.success {
            CliError::EXIT_OK
        } else {
            CliError::EXIT_MISSION_FAILED
        },
        summary,
        artifacts: vec![traj_path, summary_path],
    })
}

/// Flies the mission under SMC and PD with the same wind realization.
pub fn compare(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let mission = cfg.mission()?;
    let smc = cfg.smc_controllers()?;
    let pd = cfg.pd_controllers()?;
    let mut calm = cfg.clone();
    calm.wind.enabled = false;
    let plant = calm.uav_plant()?;
    let wind = cfg.wind.enabled.then(|| cfg.wind_model());
    prepare_dir(&opts.out_dir)?;

    let report = compare_controllers(&plant, &smc, &pd, &mission, wind).map_err(CliError::from_nav)?;
    let smc_path = opts.out_dir.join("trajectory_smc.csv");
    let pd_path = opts.out_dir.join("trajectory_pd.csv");
    let cmp_path = opts.out_dir.join("comparison.csv");
    io::write_trajectory(&smc_path, &report.smc.trajectory)?;
    io::write_trajectory(&pd_path, &report.pd.trajectory)?;
    io::write_comparison(&cmp_path, &report)?;

    let mut summary = String::new();
    let _ = match wind {
        Some(w) => writeln!(
            summary,
            "wind mean ({:.3}, {:.3}, {:.3}) m/s, gust std {} m/s, seed {}",
            w.mean_velocity[0], w.mean_velocity[1], w.mean_velocity[2], w.gust_std, w.seed
        ),
        None => writeln!(summary, "calm air"),
    };
    summary.push_str(&mission_summary("smc", &report.smc));
    summary.push_str(&mission_summary("pd", &report.pd));
    let _ = writeln!(
        summary,
        "command effort RMS: smc {:.4} m/s, pd {:.4} m/s",
        report.smc_metrics.effort_rms, report.pd_metrics.effort_rms
    );
    let verdict = match (report.smc.success, report.pd.success) {
        (true, false) => "SMC held the band; PD did not",
        (false, true) => "PD held the band; SMC did not",
        (true, true) => "both controllers held the band",
        (false, false) => "neither controller held the band",
    };
    let _ = writeln!(summary, "verdict: {verdict}");
    let summary_path = opts.out_dir.join("comparison_summary.txt");
    write_text(&summary_path, &summary)?;
    Ok(Outcome {
        exit_code: CliError::EXIT_OK,
        summary,
        artifacts: vec![smc_path, pd_path, cmp_path, summary_path],
    })
}

/// Runs the PD tuning heuristic on the configured models and prints the
/// gains as a config fragment. Writes nothing.
pub fn tune_pd(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (xy, z) = cfg.models()?;
    let dt = cfg.mission.dt;
    let gxy = tune_pd_heuristic(&xy, cfg.limits.xy, dt).map_err(CliError::from_nav)?;
    let gz = tune_pd_heuristic(&z, cfg.limits.z, dt).map_err(CliError::from_nav)?;
    let summary = format!(
        "[pd.xy]\nk_p = {:?}\nk_d = {:?}\n\n[pd.z]\nk_p = {:?}\nk_d = {:?}\n",
        gxy.k_p, gxy.k_d, gz.k_p, gz.k_d
    );
    Ok(Outcome {
        exit_code: CliError::EXIT_OK,
        summary,
        artifacts: Vec::new(),
    })
}
