use std::f64::consts::{FRAC_PI_2, PI};

use csflab_core::geometry::*;
use csflab_core::solitons::*;
use proptest::prelude::*;

#[test]
fn every_preset_solves_its_equation() {
    for name in PRESET_NAMES {
        let p = preset(name).unwrap();
        let prof = p.generate().unwrap();
        assert!(prof.blowup_arclength.is_none(), "{name}");
        let r = residual(&prof.curve, &p.spec).unwrap();
        assert!(r < 1e-6, "{name}: residual {r}");
    }
}

#[test]
fn shrinker_circle_has_radius_root_two() {
    let c = preset("shrinker-circle").unwrap().generate().unwrap().curve;
    assert!(c.is_closed());
    let worst = c.points().iter().map(|p| (p.norm() - 2f64.sqrt()).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-5);
}

#[test]
fn one_sided_shrinker_returns_to_its_start() {
    let p = generate(&SolitonSpec::shrinker(), Start::new(2f64.sqrt(), 0.0, FRAC_PI_2), 2.0 * PI * 2f64.sqrt(), 1e-3).unwrap();
    let pts = p.curve.points();
    assert!(pts[pts.len() - 1].distance(pts[0]) < 1e-5);
}

#[test]
fn translator_from_the_apex_is_the_grim_reaper() {
    let spec = SolitonSpec::translator(Vec2::new(0.0, 1.0)).unwrap();
    let p = generate(&spec, Start::new(0.0, 0.0, 0.0), 2.8, 1e-3).unwrap();
    for q in p.curve.points() {
        assert!((q.y + q.x.cos().ln()).abs() < 1e-6);
    }
}

#[test]
fn yin_yang_leaves_the_origin_flat_and_spirals_out() {
    let spec = SolitonSpec::rotator(-1.0).unwrap();
    let p = generate(&spec, Start::new(0.0, 0.0, 0.0), 30.0, 1e-3).unwrap();
    let k = signed_curvature(&p.curve).unwrap();
    assert!(k[1].kappa.abs() < 1e-2 && k[0].kappa.abs() < 1e-2);
    let s = p.curve.arclength_params();
    let pts = p.curve.points();
    let first = s.partition_point(|&v| v <= 2.0);
    for i in first + 1..pts.len() {
        assert!(pts[i].norm() >= pts[i - 1].norm() - 1e-12);
    }
}

#[test]
fn residual_of_sampled_circles() {
    let c = Curve::circle(Vec2::ZERO, 2f64.sqrt(), 1024).unwrap();
    assert!(residual(&c, &SolitonSpec::shrinker()).unwrap() < 1e-4);
    let unit = Curve::circle(Vec2::ZERO, 1.0, 1024).unwrap();
    assert!((residual(&unit, &SolitonSpec::shrinker()).unwrap() - 0.5).abs() < 1e-3);
}

#[test]
fn counterexample_classification() {
    let cases = [
        ("grim-reaper", Some(true), Some(true)),
        ("yin-yang", Some(false), None),
        ("expand-rotator", Some(false), Some(true)),
        ("shrink-rotator", None, Some(false)),
    ];
    for (name, convex, gamma_ok) in cases {
        let p = preset(name).unwrap();
        let c = p.generate().unwrap().curve;
        let r = classify_counterexample(&p.spec, &c, 0.1).unwrap();
        assert!(r.residual < 1e-6);
        if let Some(v) = convex {
            assert_eq!(r.weakly_convex, v, "{name}");
        }
        if let Some(v) = gamma_ok {
            assert_eq!(r.gamma_ok, v, "{name}: {:?}", r.gamma_report);
        }
    }
}

#[test]
fn spirals_start_on_the_x_axis_heading_up() {
    for name in ["shrink-rotator", "expand-rotator"] {
        let p = preset(name).unwrap();
        assert_eq!(p.start.point, Vec2::new(1.0, 0.0));
        assert!((p.start.theta - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(p.spec.omega, 2.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scaling_covariance(
        lambda in -0.6f64..0.6, omega in -1.5f64..1.5, ex in -1.0f64..1.0, ey in -1.0f64..1.0,
        theta in -3.0f64..3.0, a in 0.3f64..3.0
    ) {
        let spec = SolitonSpec::custom(lambda, omega, Vec2::new(ex, ey));
        let p = generate(&spec, Start::new(0.2, -0.1, theta), 3.0, 1e-3).unwrap();
        prop_assume!(p.blowup_arclength.is_none());
        prop_assert!(residual(&p.curve, &spec).unwrap() < 1e-6);
        let scaled = scale_curve(&p.curve, a).unwrap();
        let r = residual(&scaled, &spec.scaled(a)).unwrap();
        prop_assert!(r < 1e-6, "scaled residual {}", r);
    }

    #[test]
    fn rotating_a_rotator_profile_keeps_it_a_rotator(omega in -2.0f64..-0.2, phi in -3.0f64..3.0) {
        let spec = SolitonSpec::rotator(omega).unwrap();
        let p = generate_two_sided(&spec, Start::new(0.5, 0.0, FRAC_PI_2), 4.0, 1e-3).unwrap();
        let turned = rotate_curve(&p.curve, phi).unwrap();
        prop_assert!(residual(&turned, &spec).unwrap() < 1e-6);
    }
}
