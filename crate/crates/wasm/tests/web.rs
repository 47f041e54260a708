use std::f64::consts::PI;

use twisted_tube_web::{field_values, qgt_values, splitting_values};

#[test]
fn field_has_unit_norm_and_turns() {
    let n = 32;
    let a = field_values(0.02, 0.02, 3.75, n).unwrap();
    let b = field_values(0.02, 0.02, 11.25, n).unwrap();
    assert_eq!(a.len(), 2 * n * n);
    let cell = (1.0 / n as f64).powi(2);
    let norm: f64 = a[..n * n].iter().map(|x| x * x * cell).sum();
    assert!((norm - 1.0).abs() < 1e-2, "{norm}");
    assert!(a[n * n..].iter().all(|p| p.abs() <= PI));
    // quarter turn: b(x, y) = a(y, -x)
    let mut worst: f64 = 0.0;
    for i1 in 0..n {
        for i2 in 0..n {
            worst = worst.max((b[i1 * n + i2] - a[i2 * n + n - 1 - i1]).abs());
        }
    }
    assert!(worst < 0.05, "{worst}");
}

#[test]
fn qgt_map_shapes() {
    let m = 12;
    let f12 = qgt_values(0.02, 0.02, 3, [0.0, 0.04], [-0.05, 0.05], m).unwrap();
    assert_eq!(f12.len(), m * m);
    assert!(f12.iter().all(|x| x.is_finite()));
    // odd f grid: the curvature is even in f
    for i in 0..m {
        for j in 0..m {
            let (x, y) = (f12[i * m + j], f12[i * m + m - 1 - j]);
            assert!((x - y).abs() <= 1e-6 * x.abs().max(1e-12), "{x} {y}");
        }
    }
    let gww = qgt_values(0.02, 0.02, 0, [0.0, 0.04], [-1.0, 1.0], m).unwrap();
    assert!(gww.iter().all(|x| *x >= 0.0));
}

#[test]
fn splitting_near_energy() {
    let v = splitting_values(0.02, 0.02, 1024).unwrap();
    let (predicted, measured) = (v[1], v[2]);
    assert!((predicted - measured).abs() / measured < 0.05, "{predicted} {measured}");
    assert!(splitting_values(0.5, 0.02, 1024).is_err());
}
