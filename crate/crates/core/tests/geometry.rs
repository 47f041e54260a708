use approx::assert_abs_diff_eq;
use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use proptest::prelude::*;
use twisted_tube::geometry::{
    embed_point, frenet_frame, gauge_divergence, gauge_divergence_by_differences, metric_by_differences,
    metric_tensor, CurveSpec, TabulatedCurve, TabulatedSpec, TransformProfile,
};
use twisted_tube::scalar::ScalarFn;
use twisted_tube::Error;

fn helix() -> CurveSpec {
    CurveSpec::helix(25.0, 25.0).unwrap()
}

fn combined() -> TransformProfile {
    TransformProfile::combined(
        0.02,
        ScalarFn::Linear { value: 0.0, slope: 0.02 },
        ScalarFn::sine(1.0, 15.0),
    )
}

fn rel(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    (a - b).amax() / b.amax()
}

#[test]
fn helix_invariants() {
    let c = helix();
    assert_abs_diff_eq!(c.curvature().value(3.0), 0.02, epsilon = 1e-15);
    assert_abs_diff_eq!(c.torsion().value(3.0), 0.02, epsilon = 1e-15);
    let f = frenet_frame(&c, 1.3).unwrap();
    assert!(f.orthonormality_defect() < 1e-14);
}

#[test]
fn frenet_serret_by_differences() {
    let c = helix();
    let (k, t) = (0.02, 0.02);
    let h = 1e-3;
    for s in [0.0, 2.5, 11.0] {
        let f = frenet_frame(&c, s).unwrap();
        let (fp, fm) = (frenet_frame(&c, s + h).unwrap(), frenet_frame(&c, s - h).unwrap());
        let d = |a: Vector3<f64>, b: Vector3<f64>| (a - b) / (2.0 * h);
        assert!((d(fp.t, fm.t) - f.n * k).amax() < 1e-9);
        assert!((d(fp.n, fm.n) - (-f.t * k + f.b * t)).amax() < 1e-9);
        assert!((d(fp.b, fm.b) + f.n * t).amax() < 1e-9);
        // unit speed
        let r = |x: f64| c.evaluate(x).unwrap().position;
        assert_abs_diff_eq!(d(r(s + h), r(s - h)).norm(), 1.0, epsilon = 1e-8);
    }
}

#[test]
fn tabulated_helix_matches_closed_form() {
    let c = helix();
    let p0 = c.evaluate(0.0).unwrap();
    let s: Vec<f64> = (0..=40).map(|k| k as f64 * 0.5).collect();
    let spec = TabulatedSpec {
        curvature: vec![0.02; s.len()],
        torsion: vec![0.02; s.len()],
        s,
        step: 1e-2,
        origin: p0.position.into(),
        frame: Some([p0.frame.t.into(), p0.frame.n.into(), p0.frame.b.into()]),
    };
    let tab = CurveSpec::Tabulated(TabulatedCurve::new(spec).unwrap());
    for x in [0.7, 5.0, 13.3, 19.9] {
        let (a, b) = (tab.evaluate(x).unwrap(), c.evaluate(x).unwrap());
        assert!((a.position - b.position).amax() < 1e-8, "{x}");
        assert!((a.frame.n - b.frame.n).amax() < 1e-8);
        assert_abs_diff_eq!(a.torsion, 0.02, epsilon = 1e-14);
    }
    // json form
    let text = serde_json::to_string(&tab).unwrap();
    assert_eq!(serde_json::from_str::<CurveSpec>(&text).unwrap(), tab);
}

#[test]
fn straight_tube_with_identity_is_flat() {
    let line = CurveSpec::helix(0.0, 1.0).unwrap();
    // no curvature: no Frenet frame
    assert!(matches!(line.evaluate(0.0), Err(Error::FrameUndefined { .. })));
}

#[test]
fn rotation_only_keeps_area() {
    let p = TransformProfile::rotation(ScalarFn::Linear { value: 0.3, slope: 0.05 });
    let c = helix();
    for (s, q) in [(1.0, Vector2::new(0.2, -0.1)), (7.0, Vector2::new(-0.4, 0.3))] {
        let m = metric_tensor(&c, &p, s, q).unwrap();
        assert_abs_diff_eq!(m.det_g, m.gamma * m.gamma, epsilon = 1e-14);
        assert_abs_diff_eq!(gauge_divergence(&p, s), 0.0);
    }
}

#[test]
fn divergence_is_minus_det_rate() {
    let p = TransformProfile::scaling(0.05, ScalarFn::sine(1.0, 6.0), ScalarFn::Const(0.5));
    let h = 1e-5;
    for s in [0.4, 2.0, 4.9] {
        let rate = (p.det(s + h) - p.det(s - h)) / (2.0 * h);
        assert_abs_diff_eq!(gauge_divergence(&p, s), -rate, epsilon = 1e-9);
        let q = Vector2::new(0.1, 0.25);
        let fd = gauge_divergence_by_differences(&helix(), &p, s, q, 1e-4).unwrap();
        assert_abs_diff_eq!(gauge_divergence(&p, s), fd, epsilon = 1e-9);
    }
}

#[test]
fn embedding_of_axis_point() {
    let c = helix();
    let r = embed_point(&c, &combined(), Vector2::zeros(), 4.0).unwrap();
    assert!((r - c.evaluate(4.0).unwrap().position).amax() < 1e-14);
}

#[test]
fn coordinates_break_down_past_focal_line() {
    let c = CurveSpec::helix(1.0, 0.0).unwrap();
    let p = TransformProfile::identity();
    assert!(matches!(
        metric_tensor(&c, &p, 0.0, Vector2::new(1.5, 0.0)),
        Err(Error::CoordinateBreakdown { .. })
    ));
    assert!(metric_tensor(&c, &p, 0.0, Vector2::new(0.5, 0.0)).is_ok());
}

#[test]
fn transform_matrix_composition() {
    let p = combined();
    let s = 2.0;
    let (th, f): (f64, f64) = (0.04, (std::f64::consts::TAU * s / 15.0).sin());
    let rot = Matrix2::new(th.cos(), -th.sin(), th.sin(), th.cos());
    let expect = rot * Matrix2::new(1.0 + 0.02 * f, 0.0, 0.0, 1.0 - 0.02 * f);
    assert!((p.matrix(s) - expect).amax() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_matches_embedding(s in 0.0f64..15.0, q1 in -0.5f64..0.5, q2 in -0.5f64..0.5, kind in 0usize..3) {
        let p = match kind {
            0 => combined(),
            1 => TransformProfile::scaling(0.05, ScalarFn::sine(0.8, 5.0), ScalarFn::Linear { value: 0.1, slope: 0.2 }),
            _ => TransformProfile::shearing(0.05, ScalarFn::sine(1.0, 7.0)),
        };
        let q = Vector2::new(q1, q2);
        let m = metric_tensor(&helix(), &p, s, q).unwrap();
        let fd = metric_by_differences(&helix(), &p, s, q, 1e-3).unwrap();
        prop_assert!(rel(&m.g, &fd) < 1e-6);
        prop_assert!((m.g.determinant() - m.det_g).abs() < 1e-10 * m.det_g);
        prop_assert!((m.g * m.g_inv - Matrix3::identity()).amax() < 1e-8);
        prop_assert!((m.g - m.g.transpose()).amax() == 0.0);
    }
}
