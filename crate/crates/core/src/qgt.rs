//! Quantum geometric tensor of the local two-level problem over the
//! parameter plane (ω, f), and Berry-phase loop integrals.
//!
//! The local matrix is a σ_z + g σ_x with a = (ω + τ)⟨L⟩p and g = 2fΔE;
//! its upper eigenvector is (cos φ, sin φ).

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::scalar::ScalarFn;
use crate::transverse::SquarePair;

/// Points with Λ(Λ − a) below this are treated as degenerate.
pub const DEGENERACY_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngle {
    pub phi: f64,
    pub cos: f64,
    pub sin: f64,
    pub lambda: f64,
}

/// cos φ = 2fΔE/√(2Λ(Λ − a)), sin φ = (Λ − a)/√(2Λ(Λ − a)) with
/// Λ = √((2fΔE)² + a²) and a = αp. φ lies in [0, π/2] for f ≥ 0.
pub fn mixing_angle(f: f64, alpha_p: f64, delta_e: f64) -> Result<MixingAngle> {
    let g = 2.0 * f * delta_e;
    let a = alpha_p;
    let lambda = g.hypot(a);
    let gap = if a > 0.0 { g * g / (lambda + a) } else { lambda - a };
    let value = lambda * gap;
    if !(value >= DEGENERACY_GUARD) {
        return Err(Error::DegenerateAngle { value });
    }
    let root = (2.0 * value).sqrt();
    let (cos, sin) = (g / root, gap / root);
    Ok(MixingAngle {
        phi: sin.atan2(cos),
        cos,
        sin,
        lambda,
    })
}

/// Fixed data of the QGT evaluation: the transverse pair and the torsion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QgtModel {
    pub pair: SquarePair,
    pub torsion: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QgtPoint {
    pub omega: f64,
    pub f: f64,
    pub p: f64,
    pub phi: f64,
    pub phi_dot: f64,
    pub lambda: f64,
    /// ⟨L⟩/2
    pub b: f64,
    pub metric: Matrix2<f64>,
    pub curvature: Matrix2<f64>,
}

impl QgtModel {
    pub fn new(pair: SquarePair, torsion: f64) -> Self {
        QgtModel { pair, torsion }
    }

    /// B = ħ⟨L⟩/2m.
    pub fn b(&self) -> f64 {
        0.5 * self.pair.l_exp()
    }

    /// a = (ω + τ)⟨L⟩p.
    pub fn alpha_p(&self, omega: f64, p: f64) -> f64 {
        (omega + self.torsion) * self.pair.l_exp() * p
    }

    pub fn angle(&self, omega: f64, f: f64, p: f64) -> Result<MixingAngle> {
        mixing_angle(f, self.alpha_p(omega, p), self.pair.delta_e())
    }
}

/// Metric and Berry curvature at (ω, f) for momentum p and rate φ̇:
///
/// g₁₁ = B²(p² sin²2φ + φ̇² cos²2φ)/Λ², g₁₂ = −(BpΔE/2) sin4φ/Λ²,
/// g₂₂ = ΔE² cos²2φ/Λ², F₁₂ = −2ΔE B φ̇ cos²2φ/Λ².
pub fn qgt_analytic(model: &QgtModel, omega: f64, f: f64, p: f64, phi_dot: f64) -> Result<QgtPoint> {
    let angle = model.angle(omega, f, p)?;
    let b = model.b();
    let de = model.pair.delta_e();
    let phi = angle.phi;
    let l2 = angle.lambda * angle.lambda;
    let (s2, c2) = (2.0 * phi).sin_cos();
    let g11 = b * b * (p * p * s2 * s2 + phi_dot * phi_dot * c2 * c2) / l2;
    let g12 = -0.5 * b * p * de * (4.0 * phi).sin() / l2;
    let g22 = de * de * c2 * c2 / l2;
    let f12 = -2.0 * de * b * phi_dot * c2 * c2 / l2;
    Ok(QgtPoint {
        omega,
        f,
        p,
        phi,
        phi_dot,
        lambda: angle.lambda,
        b,
        metric: Matrix2::new(g11, g12, g12, g22),
        curvature: Matrix2::new(0.0, f12, -f12, 0.0),
    })
}

/// Upper eigenvector of a σ_z + g σ_x by direct diagonalisation, sign fixed
/// to have non-negative overlap with `reference`.
fn upper_eigenvector(a: f64, g: f64, reference: Option<Vector2<f64>>) -> Result<Vector2<f64>> {
    let eig = Matrix2::new(a, g, g, -a).symmetric_eigen();
    let gap = (eig.eigenvalues[0] - eig.eigenvalues[1]).abs();
    if gap * gap < DEGENERACY_GUARD {
        return Err(Error::DegenerateAngle { value: gap * gap });
    }
    let k = if eig.eigenvalues[0] > eig.eigenvalues[1] { 0 } else { 1 };
    let mut v: Vector2<f64> = eig.eigenvectors.column(k).into();
    let r = reference.unwrap_or(Vector2::new(1.0, 1.0));
    if v.dot(&r) < 0.0 {
        v = -v;
    }
    Ok(v)
}

/// Pure-state metric Re⟨∂u|(1 − |u⟩⟨u|)|∂u⟩ of the local eigenvector by
/// central differences in (ω, f); the step for each parameter is
/// `h·max(1, |x|)`.
pub fn qgt_fd_oracle(model: &QgtModel, omega: f64, f: f64, p: f64, h: f64) -> Result<Matrix2<f64>> {
    let de = model.pair.delta_e();
    let vec_at = |w: f64, ff: f64, r: Option<Vector2<f64>>| upper_eigenvector(model.alpha_p(w, p), 2.0 * ff * de, r);
    let u = vec_at(omega, f, None)?;
    let hw = h * omega.abs().max(1.0);
    let hf = h * f.abs().max(1.0);
    let du = [
        (vec_at(omega + hw, f, Some(u))? - vec_at(omega - hw, f, Some(u))?) / (2.0 * hw),
        (vec_at(omega, f + hf, Some(u))? - vec_at(omega, f - hf, Some(u))?) / (2.0 * hf),
    ];
    let proj = |x: &Vector2<f64>| x - u * u.dot(x);
    Ok(Matrix2::from_fn(|i, j| proj(&du[i]).dot(&proj(&du[j]))))
}

/// φ̇ over the parameter plane from constant drive rates: φ̇ = ∂_ωφ·ω̇ + ∂_fφ·ḟ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiDotField {
    pub model: QgtModel,
    pub p: f64,
    pub omega_rate: f64,
    pub f_rate: f64,
}

impl PhiDotField {
    /// Rates taken as max|ω′| and max|f′| of the configured profiles over `[0, s0]`.
    pub fn from_profiles(model: QgtModel, p: f64, theta: &ScalarFn, f: &ScalarFn, s0: f64) -> Self {
        PhiDotField {
            model,
            p,
            omega_rate: theta.max_abs(0.0, s0, 512, 2),
            f_rate: f.max_abs(0.0, s0, 512, 1),
        }
    }

    pub fn eval(&self, omega: f64, f: f64) -> Result<f64> {
        let phi = |w: f64, ff: f64| self.model.angle(w, ff, self.p).map(|a| a.phi);
        let hw = 1e-6 * omega.abs().max(1.0);
        let hf = 1e-6 * f.abs().max(1.0);
        let dw = (phi(omega + hw, f)? - phi(omega - hw, f)?) / (2.0 * hw);
        let df = (phi(omega, f + hf)? - phi(omega, f - hf)?) / (2.0 * hf);
        Ok(dw * self.omega_rate + df * self.f_rate)
    }
}

/// dφ/ds along the configured path ω(s) = θ′(s), f(s).
pub fn phi_dot_path(model: &QgtModel, p: f64, theta: &ScalarFn, f: &ScalarFn, s: f64) -> Result<f64> {
    let phi = |x: f64| model.angle(theta.eval(x, 1), f.value(x), p).map(|a| a.phi);
    let h = 1e-5;
    Ok((phi(s + h)? - phi(s - h)?) / (2.0 * h))
}

/// Both routes to the Berry phase of a closed loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerryLoop {
    /// ∬F₁₂ dω df over the enclosed region (signed by orientation)
    pub area_integral: f64,
    /// ∮A·dl with A = (−∫F₁₂ df, 0)
    pub line_integral: f64,
    /// signed polygon area
    pub enclosed_area: f64,
}

/// Berry phase of a closed polyline in (ω, f) (vertices in order, last edge
/// implied). `resolution` is the Gauss–Legendre order per dimension.
pub fn berry_loop(
    model: &QgtModel,
    vertices: &[(f64, f64)],
    p: f64,
    phi_dot: &dyn Fn(f64, f64) -> Result<f64>,
    resolution: usize,
) -> Result<BerryLoop> {
    if vertices.len() < 3 {
        return Err(Error::InvalidInput("a loop needs at least 3 vertices".into()));
    }
    let curvature = |w: f64, f: f64| -> Result<f64> {
        let pd = phi_dot(w, f)?;
        Ok(qgt_analytic(model, w, f, p, pd)?.curvature[(0, 1)])
    };
    let (x, wts) = gauss_legendre(resolution.max(2));
    let unit: Vec<(f64, f64)> = x.iter().zip(&wts).map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
    let v = |i: usize| Vector2::new(vertices[i % vertices.len()].0, vertices[i % vertices.len()].1);
    let n = vertices.len();

    // fan from vertex 0; each triangle by the Duffy map
    // x = v0 + u(v1 − v0) + ut(v2 − v1), dx = u·det dt du
    let mut area = 0.0;
    let mut enclosed = 0.0;
    for k in 1..n - 1 {
        let (a, b, c) = (v(0), v(k), v(k + 1));
        let e1 = b - a;
        let e2 = c - b;
        let det = e1.x * e2.y - e1.y * e2.x;
        enclosed += 0.5 * det;
        if det == 0.0 {
            continue;
        }
        for &(u, wu) in &unit {
            for &(t, wt) in &unit {
                let pt = a + e1 * u + e2 * (u * t);
                area += wu * wt * u * det * curvature(pt.x, pt.y)?;
            }
        }
    }

    let f_ref = vertices.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let a_omega = |w: f64, f: f64| -> Result<f64> {
        let span = f - f_ref;
        if span == 0.0 {
            return Ok(0.0);
        }
        let mut acc = 0.0;
        for &(t, wt) in &unit {
            acc += wt * curvature(w, f_ref + t * span)?;
        }
        Ok(-acc * span)
    };
    let mut line = 0.0;
    for k in 0..n {
        let (a, b) = (v(k), v(k + 1));
        let d = b - a;
        if d.x == 0.0 {
            continue;
        }
        for &(t, wt) in &unit {
            let pt = a + d * t;
            line += wt * d.x * a_omega(pt.x, pt.y)?;
        }
    }
    Ok(BerryLoop {
        area_integral: area,
        line_integral: line,
        enclosed_area: enclosed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn pure_sigma_x_limit() {
        let a = mixing_angle(1.0, 0.0, 3.0).unwrap();
        assert_abs_diff_eq!(a.lambda, 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.cos, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(a.phi, FRAC_PI_4, epsilon = 1e-15);
    }

    #[test]
    fn pure_sigma_z_limit() {
        // the printed definitions send φ to π/2 for αp < 0 and to 0 for αp > 0
        let a = mixing_angle(1e-4, -2.0, 3.0).unwrap();
        assert!(a.cos.abs() < 1e-3);
        assert_abs_diff_eq!(a.phi, std::f64::consts::FRAC_PI_2, epsilon = 1e-3);
        let a = mixing_angle(1e-4, 2.0, 3.0).unwrap();
        assert!(a.phi.abs() < 1e-3);
    }

    #[test]
    fn degenerate_points_rejected() {
        assert!(matches!(mixing_angle(0.0, 0.0, 3.0), Err(Error::DegenerateAngle { .. })));
        assert!(matches!(mixing_angle(0.0, 1.0, 3.0), Err(Error::DegenerateAngle { .. })));
        assert!(mixing_angle(0.0, -1.0, 3.0).is_ok());
    }
}
