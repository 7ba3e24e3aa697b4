use brickfly_core::{simulate_open_loop, step_axis, AxisState, FirstOrderModel, TimeSeries, UavPlant};
use proptest::prelude::*;

fn model() -> impl Strategy<Value = FirstOrderModel> {
    (0.3f64..3.0, 0.1f64..2.0).prop_map(|(k, tau)| FirstOrderModel::new(k, tau).unwrap())
}

fn run_steps(model: &FirstOrderModel, u: f64, dt: f64, horizon: f64) -> AxisState {
    let n = (horizon / dt).round() as usize;
    (0..n).fold(AxisState::default(), |s, _| step_axis(model, s, u, 0.0, dt).unwrap())
}

#[test]
fn fine_and_coarse_steps_agree() {
    for m in [FirstOrderModel::PAPER_XY, FirstOrderModel::PAPER_Z] {
        let coarse = run_steps(&m, 2.0, 0.02, 6.0);
        let fine = run_steps(&m, 2.0, 0.002, 6.0);
        let v_final = m.gain() * 2.0;
        assert!((coarse.velocity - fine.velocity).abs() < 1e-3 * v_final);
        assert!((coarse.position - fine.position).abs() < 1e-3 * fine.position.abs());
    }
}

#[test]
fn unperturbed_plant_is_a_pure_function() {
    let run = || {
        let mut plant = UavPlant::paper_nominal();
        let mut trace = Vec::new();
        for k in 0..300 {
            let u = [(k as f64 * 0.05).sin(), 1.0, -0.5];
            plant.step(u, 0.02).unwrap();
            trace.push(plant.position());
        }
        trace
    };
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn response_scales_with_input(m in model(), alpha in -5.0f64..5.0, w in 0.2f64..10.0) {
        let dt = 0.01;
        prop_assume!(dt <= m.tau() / 5.0);
        let u = TimeSeries::from_fn(dt, 400, |t| (w * t).sin() + 0.3).unwrap();
        let scaled = TimeSeries::from_fn(dt, 400, |t| alpha * ((w * t).sin() + 0.3)).unwrap();
        let y = simulate_open_loop(&m, &u, dt).unwrap();
        let ys = simulate_open_loop(&m, &scaled, dt).unwrap();
        for (a, b) in y.values().iter().zip(ys.values()) {
            prop_assert!((alpha * a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn step_response_never_overshoots(m in model(), amp in 0.1f64..5.0) {
        let dt = 0.02;
        prop_assume!(dt <= m.tau() / 5.0);
        let u = TimeSeries::constant(dt, 1000, amp).unwrap();
        let y = simulate_open_loop(&m, &u, dt).unwrap();
        let bound = m.gain() * amp;
        prop_assert!(y.values().iter().all(|&v| v <= bound * (1.0 + 1e-12)));
        prop_assert!(y.values().windows(2).all(|p| p[1] >= p[0]));
    }
}
