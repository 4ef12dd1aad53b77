//! Property tests of the module invariants.

use bartnik_core::adn::{
    certificate_det_value, complementing_check_numeric, complementing_check_symbolic, proper_ellipticity_check,
    CoefficientSample,
};
use bartnik_core::flatbvp::{solve, BoundaryData, ResidualPoints};
use bartnik_core::geometry::bartnik::{boost_parameters, data_change, BoundaryPoint, TimeFunction};
use bartnik_core::geometry::fixtures::{fixture, FixtureName};
use bartnik_core::geometry::verify::flat_gauge_split;
use nalgebra::Rotation3;
use proptest::prelude::*;

/// Admissible coefficients: N in [0.5, 2], |X| < 0.95 N, η on a circle of radius in [0.1, 10].
fn sample() -> impl Strategy<Value = CoefficientSample> {
    (
        0.5..2.0f64,
        -1.0..1.0f64,
        0.0..std::f64::consts::TAU,
        0.0..0.95f64,
        0.0..std::f64::consts::TAU,
        -1.0..1.0f64,
    )
        .prop_map(|(lapse, cos, phi, frac, angle, log_scale)| {
            let s = (1.0 - cos * cos).sqrt();
            let x = frac * lapse;
            let shift = [x * s * phi.cos(), x * s * phi.sin(), x * cos];
            let scale = 10f64.powf(log_scale);
            CoefficientSample::new(lapse, shift, [scale * angle.cos(), scale * angle.sin()]).expect("admissible")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_are_conjugate(s in sample()) {
        let r = proper_ellipticity_check(&s).unwrap();
        prop_assert!(r.z_plus.im > 0.0);
        prop_assert!((r.z_minus - r.z_plus.conj()).norm() <= 1e-12 * r.z_plus.norm().max(1.0));
    }

    #[test]
    fn complementing_determinant_matches_closed_form(s in sample()) {
        let c = complementing_check_numeric(&s).unwrap();
        prop_assert!(c.relative_error < 1e-8, "relative error {}", c.relative_error);
    }

    #[test]
    fn boundary_fixing_translations_leave_data_invariant(
        spin in 0.0..0.9f64,
        polar in 0.2..2.9f64,
        azimuth in 0.0..std::f64::consts::TAU,
        c in -0.1..0.1f64,
    ) {
        let f = fixture(FixtureName::Kerr { mass: 1.0, spin }).unwrap();
        let r = f.boundary_radius();
        let p = BoundaryPoint::new(r, polar, azimuth);
        let (a, b) = boost_parameters(&f.metric.stationary(), &TimeFunction::linear_tilt(c, r), &p).unwrap();
        prop_assert!((a * a - b * b - 1.0).abs() < 1e-12);
        let change = data_change(&f.metric, &TimeFunction::quadratic_tilt(c, r), &p).unwrap();
        prop_assert!(change < 1e-6, "data change {change:e}");
    }

    #[test]
    fn flat_gauge_split_holds(seed in any::<u64>()) {
        prop_assert!(flat_gauge_split(seed, 2) < 1e-8);
    }

    #[test]
    fn boundary_data_json_round_trip(lmax in 0usize..4, seed in any::<u64>(), amp in 1e-6..1.0f64) {
        let d = BoundaryData::random(lmax, amp, seed);
        let back = BoundaryData::from_json(&serde_json::to_string(&d).unwrap()).unwrap();
        prop_assert_eq!(back, d);
    }
}

#[test]
fn symbolic_certificate_matches_numeric_determinant() {
    let cert = complementing_check_symbolic().certificate.expect("certificate");
    proptest!(ProptestConfig::with_cases(50), |(s in sample())| {
        let c = complementing_check_numeric(&s).unwrap();
        let want = certificate_det_value(&cert, &s);
        prop_assert!((c.det_value - want).norm() <= 1e-8 * want.abs());
    });
}

fn momentum_free_data() -> impl Strategy<Value = BoundaryData> {
    (0usize..=2, any::<u64>(), 1e-4..1e-2f64)
        .prop_map(|(l, seed, amp)| BoundaryData::random(l, amp, seed).momentum_free())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn solutions_are_harmonic_gauged_and_attain_the_data(data in momentum_free_data(), seed in any::<u64>()) {
        let pts = ResidualPoints { seed, ..ResidualPoints::default() };
        let (_, report) = solve(&data, 4, pts).unwrap();
        prop_assert!(report.interior_residual.unwrap() < 1e-10);
        prop_assert!(report.gauge_residual.unwrap() < 1e-8);
        prop_assert!(report.boundary_residual.unwrap() < 1e-8);
    }

    #[test]
    fn solutions_are_stable_under_truncation(data in momentum_free_data()) {
        let (coarse, _) = solve(&data, 4, ResidualPoints::default()).unwrap();
        let (fine, _) = solve(&data, 6, ResidualPoints::default()).unwrap();
        prop_assert!(coarse.distance(&fine) < 1e-8);
    }

    #[test]
    fn solve_commutes_with_rotations(
        data in momentum_free_data(),
        roll in -3.0..3.0f64,
        pitch in -1.5..1.5f64,
        yaw in -3.0..3.0f64,
    ) {
        let rot = Rotation3::from_euler_angles(roll, pitch, yaw);
        let (sol, _) = solve(&data, 4, ResidualPoints::default()).unwrap();
        let (turned, _) = solve(&data.rotated(&rot), 4, ResidualPoints::default()).unwrap();
        prop_assert!(turned.distance(&sol.rotated(&rot).unwrap()) < 1e-8);
    }
}
