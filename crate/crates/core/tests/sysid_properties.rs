use brickfly_core::sysid::{
    build_bode, estimate_gain, identify, magnitude_at, mapd, peak_frequency, run_sweep,
    generate_sine, SweepSpec,
};
use brickfly_core::{simulate_open_loop, FirstOrderModel, TimeSeries};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn pipeline_recovers_model(k in 0.5f64..2.0, tau in 0.1f64..1.0) {
        let truth = FirstOrderModel::new(k, tau).unwrap();
        let spec = SweepSpec::paper_default(1.0).unwrap();
        let (_, id) = identify(&truth, &spec, 0.01).unwrap();
        prop_assert!((id.model.gain() - k).abs() <= 0.02 * k, "K {} vs {}", id.model.gain(), k);
        prop_assert!((id.model.tau() - tau).abs() <= 0.05 * tau, "tau {} vs {}", id.model.tau(), tau);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mapd_is_nonnegative_and_scale_free(
        exp in prop::collection::vec(0.01f64..10.0, 8..64),
        noise in prop::collection::vec(-0.5f64..0.5, 64),
        scale in 0.01f64..100.0,
    ) {
        let sim: Vec<f64> = exp.iter().zip(&noise).map(|(e, n)| e + n).collect();
        let e = TimeSeries::new(0.02, 0.0, exp.clone()).unwrap();
        let s = TimeSeries::new(0.02, 0.0, sim.clone()).unwrap();
        let d = mapd(&e, &s).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert_eq!(mapd(&e, &e).unwrap(), 0.0);
        let es = TimeSeries::new(0.02, 0.0, exp.iter().map(|v| v * scale).collect()).unwrap();
        let ss = TimeSeries::new(0.02, 0.0, sim.iter().map(|v| v * scale).collect()).unwrap();
        let ds = mapd(&es, &ss).unwrap();
        prop_assert!((d - ds).abs() <= 1e-9 * (1.0 + d));
        let differs = exp.iter().zip(&sim).any(|(a, b)| a != b);
        prop_assert_eq!(d > 0.0, differs);
    }
}

#[test]
fn magnitude_is_monotone_in_frequency() {
    for m in [FirstOrderModel::PAPER_XY, FirstOrderModel::PAPER_Z] {
        let bode = build_bode(&m, &SweepSpec::paper_default(1.0).unwrap(), 0.02).unwrap();
        for pair in bode.windows(2) {
            assert!(pair[1].mag_db <= pair[0].mag_db + 1e-9);
        }
    }
}

#[test]
fn output_frequency_matches_input_across_grid() {
    for m in [FirstOrderModel::PAPER_XY, FirstOrderModel::PAPER_Z] {
        let records = run_sweep(&m, &SweepSpec::paper_default(1.0).unwrap(), 0.02).unwrap();
        for r in &records {
            assert!((r.peak_omega - r.omega).abs() < 1e-2, "{} vs {}", r.peak_omega, r.omega);
        }
    }
}

#[test]
fn gain_estimate_ignores_amplitude() {
    for m in [FirstOrderModel::PAPER_XY, FirstOrderModel::PAPER_Z] {
        let small = build_bode(&m, &SweepSpec::paper_default(0.5).unwrap(), 0.02).unwrap();
        let large = build_bode(&m, &SweepSpec::paper_default(5.0).unwrap(), 0.02).unwrap();
        let (a, b) = (estimate_gain(&small).unwrap(), estimate_gain(&large).unwrap());
        assert!((a - b).abs() <= 0.005 * a);
    }
}

#[test]
fn magnitude_matches_closed_form_at_corner() {
    let m = FirstOrderModel::PAPER_XY;
    let w = 1.0 / m.tau();
    let u = generate_sine(1.0, w, 40.0, 0.02).unwrap();
    let y = simulate_open_loop(&m, &u, 0.02).unwrap();
    let db = magnitude_at(&u, &y, w, 3).unwrap();
    let expected = 20.0 * (m.gain() / 2f64.sqrt()).log10();
    assert!((db - expected).abs() < 0.01, "{db} vs {expected}");
    assert!((peak_frequency(&y.tail_from(1000).unwrap()).unwrap() - w).abs() < 1e-2);
}
