use brickfly_core::{
    band_hold_monitor, run_mission, tune_pd_heuristic, ControllerSet, FirstOrderModel, Mission,
    MissionResult, SmcParams, UavPlant, WindModel,
};
use proptest::prelude::*;

fn smc() -> ControllerSet {
    let p = SmcParams::new(2.0, 3.5, 1.0, 0.05).unwrap();
    ControllerSet::smc(p, p, FirstOrderModel::PAPER_XY, FirstOrderModel::PAPER_Z)
}

fn check_consistency(r: &MissionResult, m: &Mission) {
    if r.success {
        let settle = r.settle_time.unwrap();
        let land = r.land_time.unwrap();
        assert!(settle + m.hold_duration <= land + 1e-9);
        assert!(land <= m.timeout + 1e-9);
        assert!(r.max_dev_after_settle.iter().all(|&d| d <= m.band_half_width));
    } else {
        assert!(r.settle_time.is_none() && r.land_time.is_none());
    }
    let samples = &r.trajectory.samples;
    assert!(samples.windows(2).all(|w| (w[1].t - w[0].t - m.dt).abs() < 1e-9));
}

/// Independent re-check of the hold window reported for a run.
fn window_holds(r: &MissionResult, m: &Mission, t0: f64) {
    let n = (m.hold_duration / m.dt).round() as usize;
    let start = (t0 / m.dt).round() as usize;
    for s in &r.trajectory.samples[start..=start + n] {
        for axis in 0..3 {
            assert!((s.position[axis] - m.target[axis]).abs() <= m.band_half_width);
        }
    }
}

#[test]
fn repeated_runs_are_identical() {
    let m = Mission::to([4.0, -2.0, 3.0]);
    let run = || {
        let plant = UavPlant::paper_nominal()
            .with_wind(WindModel::paper_field(17))
            .unwrap();
        run_mission(plant, &smc(), &m).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn monitor_agrees_with_mission_settle() {
    let m = Mission::to([3.0, 4.0, 2.0]);
    let r = run_mission(UavPlant::paper_nominal(), &smc(), &m).unwrap();
    let range = r.trajectory.phase_range(brickfly_core::Phase::Navigate).unwrap();
    let axes: Vec<_> = (0..3)
        .map(|a| {
            let all = r.trajectory.position(a).unwrap();
            let values = all.values()[..=range.end].to_vec();
            brickfly_core::TimeSeries::new(m.dt, 0.0, values).unwrap()
        })
        .collect();
    let t0 = band_hold_monitor(&axes, &m.target, m.band_half_width, m.hold_duration, m.dt).unwrap();
    assert!((t0 - r.settle_time.unwrap()).abs() < 1e-9);
    window_holds(&r, &m, t0);
}

#[test]
fn presets_survive_model_grid() {
    let m = Mission::to([5.0, 5.0, 2.0]);
    for gk in [0.7, 1.0, 1.3] {
        for tf in [0.7, 1.0, 1.3] {
            let models = [
                FirstOrderModel::PAPER_XY.scaled(gk, tf).unwrap(),
                FirstOrderModel::PAPER_XY.scaled(gk, tf).unwrap(),
                FirstOrderModel::PAPER_Z.scaled(gk, tf).unwrap(),
            ];
            let plant = UavPlant::paper_nominal().with_models(models).unwrap();
            let r = run_mission(plant, &smc(), &m).unwrap();
            assert!(r.success, "K x{gk}, tau x{tf}");
            check_consistency(&r, &m);
        }
    }
}

#[test]
fn heuristic_pd_holds_band_in_calm_air() {
    let pd = ControllerSet::pd(
        tune_pd_heuristic(&FirstOrderModel::PAPER_XY, 5.0, 0.02).unwrap(),
        tune_pd_heuristic(&FirstOrderModel::PAPER_Z, 3.0, 0.02).unwrap(),
    );
    let m = Mission::to([5.0, 5.0, 2.0]);
    let r = run_mission(UavPlant::paper_nominal(), &pd, &m).unwrap();
    assert!(r.success);
    check_consistency(&r, &m);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mission_results_are_consistent(
        x in -10.0f64..10.0,
        y in -10.0f64..10.0,
        z in 0.5f64..10.0,
        seed in any::<u64>(),
        windy in any::<bool>(),
    ) {
        let m = Mission::to([x, y, z]);
        let mut plant = UavPlant::paper_nominal();
        if windy {
            plant = plant.with_wind(WindModel::paper_field(seed)).unwrap();
        }
        let r = run_mission(plant, &smc(), &m).unwrap();
        check_consistency(&r, &m);
        if let Some(t0) = r.settle_time {
            window_holds(&r, &m, t0);
        }
    }
}
