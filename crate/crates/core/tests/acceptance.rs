//! End-to-end acceptance checks. Each prints one PASS/FAIL line; the test
//! fails if any of them fails.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::{Matrix3, SymmetricEigen, Vector2};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use twisted_tube::dynamics::{
    discretize, eigensolve, measured_splitting, phase_evolution_scan, predicted_splitting, Boundary, Branch, Grid1D,
};
use twisted_tube::effective::{
    assemble_combined, assemble_rotation_circular, assemble_rotation_square, assemble_scaling_circular,
    assemble_scaling_square, assemble_shearing, Axis, EffectiveHamiltonian,
};
use twisted_tube::geometry::{metric_by_differences, metric_tensor, CurveSpec, TransformProfile};
use twisted_tube::qgt::{berry_loop, qgt_analytic, qgt_fd_oracle, PhiDotField, QgtModel};
use twisted_tube::scalar::{Combination, ScalarFn};
use twisted_tube::transverse::{
    angular_expectation, angular_expectation_quadrature, circular_mode, deformation_matrix_quadrature,
    pauli_components, CrossSection, SquarePair,
};

const S0: f64 = 15.0;

// straight to the process stdout so the lines survive libtest's capture
fn say(line: String) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(n: usize, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    if let Some(b) = budget {
        if took > b {
            out.pass = false;
            out.detail.push_str(&format!("; over the {:?} budget", b));
        }
    }
    let tag = if out.pass { "PASS" } else { "FAIL" };
    say(format!("[{tag}] {n}. {name}: {} ({:.2} s)", out.detail, took.as_secs_f64()));
    out.pass
}

fn helix() -> CurveSpec {
    CurveSpec::helix(25.0, 25.0).unwrap()
}

fn pair12() -> SquarePair {
    SquarePair::new(1, 2, 1.0).unwrap()
}

fn theta() -> ScalarFn {
    ScalarFn::Linear { value: 0.0, slope: 0.02 }
}

fn squeeze_f() -> ScalarFn {
    ScalarFn::sine(1.0, S0)
}

/// δ = 0.02, ω = τ = 0.02, f = sin(2πs/s₀), pair (1, 2).
fn tube() -> EffectiveHamiltonian {
    let omega = Combination::zero().plus_derivative(1.0, &theta(), 1);
    assemble_combined(&Axis::of(&helix()), &omega, &squeeze_f(), 0.02, &pair12(), true)
}

/// 100 × the largest of |2δfΔE| and α²/2.
fn energy(h: &EffectiveHamiltonian) -> f64 {
    let g = 2.0 * 0.02 * pair12().delta_e();
    let a = h.alpha(0.0);
    100.0 * g.max(0.5 * a * a)
}

fn metric_oracle() -> Outcome {
    let profile = TransformProfile::combined(0.02, theta(), squeeze_f());
    let curve = helix();
    let mut rng = StdRng::seed_from_u64(20240611);
    let (mut g_err, mut det_err, mut inv_err) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..200 {
        let s = rng.random_range(0.0..S0);
        let q = Vector2::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
        let m = metric_tensor(&curve, &profile, s, q).unwrap();
        let fd = metric_by_differences(&curve, &profile, s, q, 1e-3).unwrap();
        g_err = g_err.max((m.g - fd).amax() / fd.amax());
        det_err = det_err.max((fd.determinant() - m.det_g).abs() / fd.determinant().abs());
        inv_err = inv_err.max((m.g * m.g_inv - Matrix3::identity()).amax());
    }
    Outcome {
        pass: g_err < 1e-6 && det_err < 1e-10 && inv_err < 1e-8,
        detail: format!("200 samples, G rel {g_err:.1e}, det rel {det_err:.1e}, G·G⁻¹−I {inv_err:.1e}"),
    }
}

fn angular_momentum() -> Outcome {
    let (mut odd_err, mut even_max) = (0.0f64, 0.0f64);
    for n1 in 1..=5u32 {
        for n2 in n1 + 1..=5 {
            let closed = angular_expectation(n1, n2);
            let quad = angular_expectation_quadrature(n1, n2, 256);
            if (n1 + n2) % 2 == 1 {
                odd_err = odd_err.max((closed - quad).abs());
            } else {
                even_max = even_max.max(closed.abs()).max(quad.abs());
            }
        }
    }
    let l12 = angular_expectation(1, 2);
    let anchor = 256.0 / (-27.0 * PI * PI);
    Outcome {
        pass: odd_err < 1e-6 && even_max < 1e-10 && (l12 - anchor).abs() < 1e-12,
        detail: format!(
            "odd sums within {odd_err:.1e}, even sums <= {even_max:.1e}, <L>12 = {l12:.6} (256/(-27 pi^2) = {anchor:.6})"
        ),
    }
}

fn degeneracy() -> Outcome {
    let axis = Axis::of(&helix());
    let omega = Combination::constant(0.02);
    let f = squeeze_f();
    let samples = [0.0, 1.9, 3.75, 7.1, 11.25];
    let zero = |h: &EffectiveHamiltonian| samples.iter().all(|&s| h.vmat(s).iter().all(|z| z.norm() == 0.0));
    let circular = circular_mode(1.0, 1, 1).unwrap();
    let vanish = zero(&assemble_rotation_square(&axis, &omega, &pair12()))
        && zero(&assemble_rotation_circular(&axis, &omega, 1))
        && zero(&assemble_scaling_circular(&axis, &f, &f.scaled(-1.0), 0.02, &circular).unwrap());

    let (delta, fv) = (0.02, 0.8);
    let scaled = assemble_scaling_square(&axis, &ScalarFn::Const(fv), &ScalarFn::Const(-fv), delta, &pair12());
    let quad = pauli_components(&deformation_matrix_quadrature([[fv, 0.0], [0.0, -fv]], &pair12(), 256));
    let sx = scaled.coupling(0.0);
    let sx_err = (sx - 2.0 * delta * fv * 1.5 * PI * PI).abs().max((sx - delta * quad[1]).abs());

    let shear = assemble_shearing(&axis, &ScalarFn::Const(1.0), &CrossSection::Square { side: 1.0 }, &pair12().mode())
        .unwrap();
    let [_, hx, hy, _] = shear.potential.components(0.0);
    let squad = pauli_components(&deformation_matrix_quadrature([[0.0, 1.0], [0.0, 0.0]], &pair12(), 256));
    // the shear lands on the σ_y slot of the |±⟩ basis
    let shear_err = (hy + 64.0 / 9.0).abs().max((hy - squad[2]).abs()).max(hx.abs()).max(squad[1].abs());
    Outcome {
        pass: vanish && sx_err < 1e-6 && shear_err < 1e-6,
        detail: format!(
            "rotation/circular squeeze V = 0: {vanish}; squeeze σ_x {sx:.6} (err {sx_err:.1e}); shear {hy:.6} (err {shear_err:.1e})"
        ),
    }
}

fn wkb_vs_solver() -> Outcome {
    let h = tube();
    let e = energy(&h);
    let grid = Grid1D::new(S0, 2048, Boundary::Periodic).unwrap();
    let op = discretize(&h, &grid).unwrap();
    let measured = measured_splitting(&op, e, 24).unwrap();
    let predicted = predicted_splitting(&h, e, S0, 512).unwrap();
    let rel = (predicted - measured.splitting).abs() / measured.splitting;
    Outcome {
        pass: rel < 0.05,
        detail: format!(
            "E = {e:.4}, harmonic {}, predicted {predicted:.5} vs eigensolver {:.5} ({:.2}%)",
            measured.harmonic,
            measured.splitting,
            100.0 * rel
        ),
    }
}

/// Pearson correlation of `b` with `a` turned by +π/2: b(x, y) against a(y, −x).
fn turned_correlation(a: &[f64], b: &[f64], n: usize) -> f64 {
    let mut pairs = Vec::with_capacity(n * n);
    for i1 in 0..n {
        for i2 in 0..n {
            pairs.push((a[i2 * n + (n - 1 - i1)], b[i1 * n + i2]));
        }
    }
    let m = pairs.len() as f64;
    let (ma, mb) = pairs.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0 / m, acc.1 + p.1 / m));
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (x, y) in pairs {
        ab += (x - ma) * (y - mb);
        aa += (x - ma) * (x - ma);
        bb += (y - mb) * (y - mb);
    }
    ab / (aa * bb).sqrt()
}

fn field_scan() -> Outcome {
    let h = tube();
    let e = energy(&h);
    let s: Vec<f64> = (0..16).map(|k| S0 * k as f64 / 16.0).collect();
    let n = 64;
    let scan = phase_evolution_scan(&h, e, Branch::Plus, &s, n).unwrap();
    let mid = 0.5 * S0;
    // s0/2 is itself a snapshot, so two intervals touch it
    let bracket = scan
        .jumps
        .iter()
        .filter(|j| j.s_before <= mid && mid <= j.s_after)
        .max_by(|a, b| a.corrected.total_cmp(&b.corrected))
        .unwrap();
    let largest = scan.largest_jump().unwrap();
    let jump_ok = (bracket.corrected - PI).abs() < 0.2 && largest == *bracket;
    let corr = turned_correlation(&scan.fields[4].amplitude, &scan.fields[12].amplitude, n);
    Outcome {
        pass: jump_ok && corr > 0.99,
        detail: format!(
            "jump {:.4} rad in [{}, {}] (raw {:.4}), 3s0/4 vs turned s0/4 correlation {corr:.6}",
            bracket.corrected, bracket.s_before, bracket.s_after, bracket.raw
        ),
    }
}

fn qgt_consistency() -> Outcome {
    let model = QgtModel::new(pair12(), 0.02);
    let p = (2.0 * energy(&tube())).sqrt();
    let (mut f12_max, mut trig, mut asym, mut min_eig, mut oracle) = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    for i in 0..50 {
        for j in 0..50 {
            let omega = 0.04 * i as f64 / 49.0;
            let f = -1.0 + 2.0 * j as f64 / 49.0;
            let pt = qgt_analytic(&model, omega, f, p, 0.0).unwrap();
            f12_max = f12_max.max(pt.curvature.amax());
            let angle = model.angle(omega, f, p).unwrap();
            trig = trig.max((angle.cos.powi(2) + angle.sin.powi(2) - 1.0).abs());
            let fd = qgt_fd_oracle(&model, omega, f, p, 1e-5).unwrap();
            asym = asym.max((fd - fd.transpose()).amax());
            min_eig = min_eig.min(SymmetricEigen::new(fd).eigenvalues.min() / fd.amax().max(1e-300));
            oracle = oracle.max((pt.metric - fd).amax() / fd.amax());
        }
    }
    let field = PhiDotField::from_profiles(model, p, &theta(), &squeeze_f(), S0);
    let vertices = [(0.005, -0.01), (0.035, -0.01), (0.035, 0.03), (0.005, 0.03)];
    let lp = berry_loop(&model, &vertices, p, &|w, f| field.eval(w, f), 16).unwrap();
    let stokes = (lp.area_integral - lp.line_integral).abs();
    Outcome {
        pass: f12_max == 0.0 && trig < 1e-12 && asym < 1e-12 && min_eig > -1e-8 && oracle < 1e-4 && stokes < 1e-4,
        detail: format!(
            "F12 max {f12_max:e} at phi_dot = 0, trig {trig:.1e}, oracle g asym {asym:.1e}, min eig {min_eig:.1e}, analytic vs oracle {oracle:.1e}, loop {:.6} area vs line diff {stokes:.1e}",
            lp.area_integral
        ),
    }
}

fn box_convergence() -> Outcome {
    let free = assemble_rotation_circular(&Axis::constant(0.0, 0.0), &Combination::zero(), 0);
    let length = 10.0;
    let exact = 0.5 * (PI / length).powi(2);
    let errors: Vec<f64> = [256, 512, 1024]
        .iter()
        .map(|&n| {
            let grid = Grid1D::new(length, n, Boundary::Dirichlet).unwrap();
            let spec = eigensolve(&discretize(&free, &grid).unwrap(), 1).unwrap();
            (spec.values[0] - exact).abs()
        })
        .collect();
    let orders = [(errors[0] / errors[1]).log2(), (errors[1] / errors[2]).log2()];
    Outcome {
        pass: orders.iter().all(|o| (o - 2.0).abs() <= 0.2),
        detail: format!("errors {:.2e}, {:.2e}, {:.2e}; orders {:.3}, {:.3}", errors[0], errors[1], errors[2], orders[0], orders[1]),
    }
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let results = [
        check(1, "metric oracle", Some(secs(5)), metric_oracle),
        check(2, "<L> closed form vs quadrature", Some(secs(10)), angular_momentum),
        check(3, "degeneracy invariants", None, degeneracy),
        check(4, "WKB splitting vs eigensolver", Some(secs(60)), wkb_vs_solver),
        check(5, "phase jump and rotated amplitude", Some(secs(30)), field_scan),
        check(6, "QGT consistency", Some(secs(30)), qgt_consistency),
        check(7, "discretization convergence", None, box_convergence),
    ];
    let passed = results.iter().filter(|r| **r).count();
    say(format!("acceptance: {passed}/{} passed", results.len()));
    assert_eq!(passed, results.len());
}
