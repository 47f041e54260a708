use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_4;
use twisted_tube::qgt::{
    berry_loop, mixing_angle, phi_dot_path, qgt_analytic, qgt_fd_oracle, PhiDotField, QgtModel,
};
use twisted_tube::scalar::ScalarFn;
use twisted_tube::transverse::SquarePair;
use twisted_tube::Error;

fn model() -> QgtModel {
    QgtModel::new(SquarePair::new(1, 2, 1.0).unwrap(), 0.02)
}

const P: f64 = 10.88;

#[test]
fn curvature_vanishes_without_phi_dot() {
    for (w, f) in [(0.02, 0.5), (-0.1, 0.01), (0.3, 2.0)] {
        let q = qgt_analytic(&model(), w, f, P, 0.0).unwrap();
        assert_eq!(q.curvature[(0, 1)], 0.0);
        assert_eq!(q.curvature[(0, 0)], 0.0);
        assert_eq!(q.curvature[(1, 1)], 0.0);
        assert_eq!(q.metric[(0, 1)], q.metric[(1, 0)]);
    }
}

#[test]
fn g22_vanishes_at_quarter_angle() {
    // ω = −τ makes a = 0, so φ = π/4
    let q = qgt_analytic(&model(), -0.02, 0.7, P, 0.3).unwrap();
    assert_abs_diff_eq!(q.phi, FRAC_PI_4, epsilon = 1e-15);
    assert!(q.metric[(1, 1)].abs() < 1e-30);
    let fd = qgt_fd_oracle(&model(), -0.02, 0.7, P, 1e-5).unwrap();
    assert!(fd[(1, 1)].abs() < 1e-6);
}

#[test]
fn g12_flips_under_mirrored_angle() {
    // φ → π/2 − φ is a → −a at fixed coupling
    let m = model();
    let p = P;
    let a0 = 3.0;
    let f0 = 0.1;
    let omega = |a: f64| a / (m.pair.l_exp() * p) - m.torsion;
    let q1 = qgt_analytic(&m, omega(a0), f0, p, 0.0).unwrap();
    let q2 = qgt_analytic(&m, omega(-a0), f0, p, 0.0).unwrap();
    assert_abs_diff_eq!(q1.phi + q2.phi, std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
    assert_abs_diff_eq!(q1.metric[(0, 1)], -q2.metric[(0, 1)], epsilon = 1e-12 * q1.metric[(0, 1)].abs());
}

#[test]
fn oracle_matches_metric_at_rest() {
    let m = model();
    for (w, f) in [(0.02, 1.0), (0.05, 0.2), (-0.03, 0.5), (0.2, 0.05)] {
        let q = qgt_analytic(&m, w, f, P, 0.0).unwrap();
        let fd = qgt_fd_oracle(&m, w, f, P, 1e-5).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let scale = q.metric.amax();
                assert!((q.metric[(i, j)] - fd[(i, j)]).abs() < 1e-4 * scale, "({w},{f}) [{i}{j}]: {} vs {}", q.metric[(i, j)], fd[(i, j)]);
            }
        }
    }
}

#[test]
fn oracle_is_symmetric_psd() {
    let fd = qgt_fd_oracle(&model(), 0.04, 0.3, P, 1e-5).unwrap();
    assert!((fd[(0, 1)] - fd[(1, 0)]).abs() < 1e-15);
    let eig = fd.symmetric_eigen().eigenvalues;
    assert!(eig.min() > -1e-10 * fd.amax());
}

#[test]
fn degeneracy_is_an_error() {
    // f = 0 with a > 0
    assert!(matches!(qgt_analytic(&model(), -0.1, 0.0, P, 0.0), Err(Error::DegenerateAngle { .. })));
    assert!(qgt_fd_oracle(&model(), -0.02, 0.0, P, 1e-5).is_err());
}

#[test]
fn loop_without_phi_dot_has_no_phase() {
    let sq = [(0.0, 0.2), (0.05, 0.2), (0.05, 0.6), (0.0, 0.6)];
    let r = berry_loop(&model(), &sq, P, &|_, _| Ok(0.0), 8).unwrap();
    assert_eq!(r.area_integral, 0.0);
    assert_eq!(r.line_integral, 0.0);
}

#[test]
fn stokes_consistency() {
    let m = model();
    let field = PhiDotField::from_profiles(m, P, &ScalarFn::Linear { value: 0.0, slope: 0.02 }, &ScalarFn::sine(1.0, 15.0), 15.0);
    assert!(field.f_rate > 0.0);
    let lp = [(0.0, 0.3), (0.06, 0.25), (0.08, 0.7), (0.02, 0.8), (-0.01, 0.55)];
    let r = berry_loop(&m, &lp, P, &|w, f| field.eval(w, f), 24).unwrap();
    assert!(r.area_integral.abs() > 1e-8);
    assert!((r.area_integral - r.line_integral).abs() < 1e-4 * r.area_integral.abs().max(1e-6), "{r:?}");
    // reversing orientation flips both
    let rev: Vec<_> = lp.iter().rev().copied().collect();
    let s = berry_loop(&m, &rev, P, &|w, f| field.eval(w, f), 24).unwrap();
    assert_abs_diff_eq!(s.area_integral, -r.area_integral, epsilon = 1e-12);
}

#[test]
fn phase_shrinks_with_area() {
    let m = model();
    let field = PhiDotField { model: m, p: P, omega_rate: 0.0, f_rate: 0.4 };
    let centre = qgt_analytic(&m, 0.03, 0.5, P, field.eval(0.03, 0.5).unwrap()).unwrap().curvature[(0, 1)];
    let mut last = f64::INFINITY;
    for e in [0.02, 0.005, 0.00125] {
        let lp = [(0.03 - e, 0.5 - e), (0.03 + e, 0.5 - e), (0.03 + e, 0.5 + e), (0.03 - e, 0.5 + e)];
        let r = berry_loop(&m, &lp, P, &|w, f| field.eval(w, f), 8).unwrap();
        // phase / area → F at the centre
        let err = (r.area_integral / r.enclosed_area - centre).abs();
        assert!(err < last);
        last = err;
    }
    assert!(last < 1e-3 * centre.abs());
}

#[test]
fn path_rate_matches_chain_rule() {
    let m = model();
    let theta = ScalarFn::Linear { value: 0.0, slope: 0.02 };
    let f = ScalarFn::sine(1.0, 15.0);
    let s = 2.0;
    let along = phi_dot_path(&m, P, &theta, &f, s).unwrap();
    let field = PhiDotField { model: m, p: P, omega_rate: 0.0, f_rate: f.derivative(s) };
    assert_abs_diff_eq!(along, field.eval(0.02, f.value(s)).unwrap(), epsilon = 1e-6);
}

proptest! {
    #[test]
    fn angle_identity(f in 1e-3f64..5.0, ap in -50.0f64..50.0, de in 0.5f64..40.0) {
        let a = mixing_angle(f, ap, de).unwrap();
        prop_assert!((a.cos * a.cos + a.sin * a.sin - 1.0).abs() < 1e-12);
        prop_assert!(a.phi >= 0.0 && a.phi <= std::f64::consts::FRAC_PI_2);
    }
}
