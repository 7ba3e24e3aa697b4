use brickfly_core::{
    closed_loop_step, pd_control, rise_time_90, run_mission, sliding_surface, smc_control,
    smc_control_hard_sign, step_axis, AxisFeedback, AxisLaw, AxisState, ControllerSet,
    FirstOrderModel, Mission, PdParams, Phase, SmcParams, UavPlant, WindModel,
};
use proptest::prelude::*;

fn nominal() -> SmcParams {
    SmcParams::new(2.0, 3.5, 1.0, 0.05).unwrap()
}

fn smc_set(p: SmcParams) -> ControllerSet {
    ControllerSet::smc(p, p, FirstOrderModel::PAPER_XY, FirstOrderModel::PAPER_Z)
}

/// Surface values over the navigation phase of `axis`.
fn surface_trace(
    result: &brickfly_core::MissionResult,
    axis: usize,
    target: f64,
    lambda: f64,
) -> Vec<f64> {
    let range = result.trajectory.phase_range(Phase::Navigate).unwrap();
    result.trajectory.samples[range]
        .iter()
        .map(|s| {
            sliding_surface(
                &AxisFeedback {
                    position: s.position[axis],
                    velocity: s.velocity[axis],
                    target,
                },
                lambda,
            )
        })
        .collect()
}

#[test]
fn surface_decreases_outside_boundary_layer_under_steady_wind() {
    let p = nominal();
    let w = 1.39;
    let a = FirstOrderModel::PAPER_XY.state_coeff();
    assert!((p.lambda * w + a * w).abs() < p.k_reach);
    let wind = WindModel {
        mean_velocity: [w, -0.5 * w, 0.0],
        gust_std: 0.0,
        gust_bandwidth: 0.5,
        seed: 0,
    };
    let plant = UavPlant::paper_nominal().with_wind(wind).unwrap();
    let mission = Mission::to([5.0, 5.0, 2.0]);
    let r = run_mission(plant, &smc_set(p), &mission).unwrap();
    assert!(r.success);
    for axis in 0..3 {
        let s = surface_trace(&r, axis, mission.target[axis], p.lambda);
        for pair in s.windows(2) {
            if pair[0].abs() > p.boundary_layer {
                assert!(pair[0] * (pair[1] - pair[0]) < 0.0, "axis {axis}: {pair:?}");
            }
        }
    }
}

#[test]
fn surface_stays_in_boundary_layer_once_reached() {
    let p = nominal();
    let mission = Mission::to([5.0, -3.0, 2.5]);
    let r = run_mission(UavPlant::paper_nominal(), &smc_set(p), &mission).unwrap();
    for axis in 0..3 {
        let s = surface_trace(&r, axis, mission.target[axis], p.lambda);
        let first = s.iter().position(|v| v.abs() <= p.boundary_layer).unwrap();
        assert!(s[first..].iter().all(|v| v.abs() <= 1.1 * p.boundary_layer));
    }
}

#[test]
fn larger_q_does_not_slow_rise() {
    let m = FirstOrderModel::PAPER_XY;
    let mut last = f64::INFINITY;
    for q in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let law = AxisLaw::Smc {
            params: nominal().with_q(q).unwrap(),
            model: m,
        };
        let ts = closed_loop_step(&m, &law, 5.0, 5.0, 0.02, 20.0).unwrap();
        let rise = rise_time_90(&ts, 5.0).unwrap();
        assert!(rise <= last + 1e-9, "q = {q}: {rise} > {last}");
        last = rise;
    }
}

#[test]
fn hard_sign_chatters_where_boundary_layer_does_not() {
    let m = FirstOrderModel::PAPER_XY;
    let p = nominal();
    let sign_flips = |hard: bool| {
        let mut state = AxisState::at(-1.0);
        let mut cmds = Vec::new();
        for _ in 0..1000 {
            let fb = AxisFeedback {
                position: state.position,
                velocity: state.velocity,
                target: 0.0,
            };
            let u = if hard {
                smc_control_hard_sign(&p, &fb, &m)
            } else {
                smc_control(&p, &fb, &m)
            };
            cmds.push(u);
            state = step_axis(&m, state, u.clamp(-5.0, 5.0), 0.0, 0.02).unwrap();
        }
        let du: Vec<f64> = cmds[500..].windows(2).map(|w| w[1] - w[0]).collect();
        du.windows(2).filter(|w| w[0] * w[1] < 0.0).count()
    };
    let hard = sign_flips(true);
    let smooth = sign_flips(false);
    assert!(hard > 400, "hard-sign flips: {hard}");
    assert!(smooth < 10, "boundary-layer flips: {smooth}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn laws_are_odd(e in -20.0f64..20.0, v in -10.0f64..10.0, target in -10.0f64..10.0) {
        let m = FirstOrderModel::PAPER_Z;
        let p = nominal();
        let pd = PdParams::new(0.6, 0.2).unwrap();
        let fb = AxisFeedback { position: target + e, velocity: v, target };
        let neg = AxisFeedback { position: target - e, velocity: -v, target };
        let (a, b) = (smc_control(&p, &fb, &m), smc_control(&p, &neg, &m));
        prop_assert!((a + b).abs() <= 1e-9 * (1.0 + a.abs()));
        let (a, b) = (pd_control(&pd, &fb), pd_control(&pd, &neg));
        prop_assert!((a + b).abs() <= 1e-9 * (1.0 + a.abs()));
    }
}
