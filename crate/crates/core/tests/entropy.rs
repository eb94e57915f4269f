mod common;

use std::f64::consts::{E, PI};

use common::*;
use csflab_core::entropy::*;
use csflab_core::flow::{analytic_history, evolve, SolverOptions};
use csflab_core::geometry::*;
use csflab_core::solitons::SolitonSpec;
use csflab_core::Error;
use proptest::prelude::*;

#[test]
fn kernel_at_the_origin_of_the_lemma_family() {
    // x0 = 0, tau = 0, eps = 0 and alpha^2 = 1/2 put the kernel scale at tau_0 = 1
    let alpha2: f64 = 0.5;
    let tau0 = 1.0 / (1.0 / alpha2 - 1.0);
    assert!((tau0 - 1.0).abs() < 1e-15);
    let x = Vec2::new(0.3, -1.1);
    let t = 5.0;
    let v = backward_heat_kernel(x, t, Vec2::ZERO, t + tau0).unwrap();
    assert!((v - (-x.norm_sq() / 4.0).exp() / (4.0 * PI).sqrt()).abs() < 1e-15);
}

#[test]
fn shrinker_circle_density_matches_closed_form() {
    let c = Curve::circle(Vec2::ZERO, 2f64.sqrt(), 1024).unwrap();
    // constant integrand: length * (4 pi)^{-1/2} e^{-r^2/4}
    let oracle = 2.0 * PI * 2f64.sqrt() * (-0.5f64).exp() / (4.0 * PI).sqrt();
    assert!((oracle - (2.0 * PI / E).sqrt()).abs() < 1e-14);
    let r = huisken_functional(&c, -1.0, Vec2::ZERO, 0.0).unwrap();
    assert!((r.value - oracle).abs() < 1e-4);
}

#[test]
fn wrong_scale_deficit_matches_closed_form() {
    let c = Curve::circle(Vec2::ZERO, 2f64.sqrt(), 1024).unwrap();
    let r = 2f64.sqrt();
    let tau = 2.0;
    let residual = 1.0 / r - r / (2.0 * tau);
    let oracle = residual * residual * 2.0 * PI * r * (-r * r / (4.0 * tau)).exp() / (4.0 * PI * tau).sqrt();
    let d = deficit(&c, -tau, Vec2::ZERO, 0.0).unwrap();
    assert!(d > 0.1);
    assert!((d - oracle).abs() < 1e-4 * oracle);
}

#[test]
fn line_tail_estimate_is_the_missing_gaussian_mass() {
    let tau: f64 = 0.5;
    let half = 3.0 * tau.sqrt();
    let c = line(2001, half, Vec2::new(0.6, -0.8), Vec2::ZERO);
    let r = huisken_functional(&c, 0.0, Vec2::ZERO, tau).unwrap();
    let missing = libm::erfc(half / (2.0 * tau.sqrt()));
    assert!((r.tail_estimate - missing).abs() < 1e-9);
    assert!((r.value + missing - 1.0).abs() < 1e-6);
}

#[test]
fn self_shrinker_flow_keeps_its_density() {
    let spec = SolitonSpec::shrinker();
    let profile = Curve::circle(Vec2::ZERO, 2f64.sqrt(), 1024).unwrap();
    let times: Vec<f64> = (0..=40).map(|k| -0.9 + 0.8 * k as f64 / 40.0).collect();
    // analytic flow from the profile at t = 0 is the shrinker with extinction at t0 = 1/(2 * 1/2) = 1
    let h = analytic_history(&spec, &profile, &times).unwrap();
    let r = verify_monotonicity(&h, Vec2::ZERO, 1.0).unwrap();
    assert!(r.lhs_drop.abs() < 1e-6);
    assert!(r.integrated_deficit < 1e-6);
}

#[test]
fn single_slice_history_has_no_drop() {
    let h = FlowHistory::new(0.0, Curve::circle(Vec2::ZERO, 1.0, 64).unwrap()).unwrap();
    let r = verify_monotonicity(&h, Vec2::ZERO, 1.0).unwrap();
    assert_eq!(r.lhs_drop, 0.0);
    assert_eq!(r.integrated_deficit, 0.0);
}

#[test]
fn truncated_line_far_too_short_is_rejected() {
    let c = line(101, 0.5, Vec2::new(1.0, 0.0), Vec2::ZERO);
    let h = FlowHistory::new(0.0, c).unwrap();
    assert!(matches!(
        verify_monotonicity(&h, Vec2::ZERO, 1.0),
        Err(Error::DivergentFunctional { .. })
    ));
}

#[test]
fn sup_entropy_of_a_point_like_curve() {
    let tiny = Curve::circle(Vec2::new(-2.0, 0.7), 1e-3, 64).unwrap();
    let s = sup_entropy(&tiny, 0.0, 1.0, &SupSearch::default()).unwrap();
    assert!((s.value - tiny.length() / (4.0 * PI).sqrt()).abs() < 1e-6);
}

#[test]
fn gamma_threshold_examples() {
    let a = 0.5f64.sqrt();
    assert!((breather_gamma_threshold(a, 0.0, 1.0).unwrap() - 0.125).abs() < 1e-15);
    assert!((breather_gamma_threshold(a, 3.0, 5.0).unwrap() - 0.0625).abs() < 1e-15);
    let mut prev = f64::INFINITY;
    for eps in [1e-1, 1e-3, 1e-6, 1e-9] {
        let v = breather_gamma_threshold(1.0 - eps, 0.0, 1.0).unwrap();
        assert!(v < prev && v > 0.0);
        prev = v;
    }
    assert!(prev < 1e-9);
    assert!(breather_gamma_threshold(1.2, 0.0, 1.0).is_err());
    assert!(breather_gamma_threshold(0.5, 1.0, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn density_is_nonincreasing_along_convex_flows(
        modes in convex_modes(), x0 in vec2(0.8), t0 in 1.0f64..3.0
    ) {
        let c = polar_curve(512, Vec2::ZERO, &modes);
        let h = evolve(&c, 0.0, 0.03, &SolverOptions::default()).unwrap();
        let mut prev = f64::INFINITY;
        for sl in h.slices() {
            let v = huisken_functional(&sl.curve, sl.t, x0, t0).unwrap().value;
            prop_assert!(v <= prev + 1e-6, "rose from {} to {} at t = {}", prev, v, sl.t);
            prev = v;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn density_is_rigid_motion_equivariant(
        modes in wiggly_modes(), th in -3.0f64..3.0, v in vec2(5.0), c0 in vec2(1.0), tau in 0.1f64..3.0
    ) {
        let c = polar_curve(200, Vec2::ZERO, &modes);
        let r = Mat2::rotation(th);
        let moved = c.with_points(c.points().iter().map(|&p| r.mul_vec(p) + v).collect()).unwrap();
        let a = huisken_functional(&c, 0.0, c0, tau).unwrap().value;
        let b = huisken_functional(&moved, 0.0, r.mul_vec(c0) + v, tau).unwrap().value;
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn sup_entropy_follows_translations(modes in wiggly_modes(), v in vec2(5.0)) {
        let c = polar_curve(120, Vec2::ZERO, &modes);
        let moved = c.with_points(c.points().iter().map(|&p| p + v).collect()).unwrap();
        let a = sup_entropy(&c, 0.0, 0.5, &SupSearch::default()).unwrap();
        let b = sup_entropy(&moved, 0.0, 0.5, &SupSearch::default()).unwrap();
        prop_assert!((a.value - b.value).abs() < 1e-8);
        prop_assert!((b.center - a.center - v).norm() < 1e-6);
        let at_centroid = huisken_functional(&c, 0.0, c.centroid(), 0.5).unwrap().value;
        prop_assert!(a.value >= at_centroid);
    }

    #[test]
    fn gamma_windows_are_nondecreasing(modes in wiggly_modes(), gamma in 0.01f64..2.0, open in any::<bool>()) {
        let c = polar_curve(300, Vec2::new(0.5, 0.0), &modes);
        let c = if open {
            Curve::open(c.points()[..250].to_vec(), true).unwrap()
        } else {
            c
        };
        let r = gamma_integral(&c, gamma, &[0.5, 1.0, 2.0, 4.0, 8.0]).unwrap();
        prop_assert!(r.window_values.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(r.window_values.iter().all(|&v| v > 0.0));
    }
}
