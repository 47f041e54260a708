use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use super::curve::CurveSpec;
use super::transform::TransformProfile;
use crate::error::{Error, Result};

/// Metric in the coordinates (q₁′, q₂′, s) at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricEvaluation {
    pub g: Matrix3<f64>,
    /// Closed form γ²|𝕋|².
    pub det_g: f64,
    pub g_inv: Matrix3<f64>,
    /// Gauge vector 𝒜 = (𝒜¹, 𝒜²).
    pub gauge: Vector2<f64>,
    pub gamma: f64,
    pub xi: Vector2<f64>,
}

/// Transverse quantities shared by the embedding and the metric.
struct Local {
    t: Matrix2<f64>,
    q_big: Vector2<f64>,
    gamma: f64,
    xi: Vector2<f64>,
}

fn local(
    kappa: f64,
    tau: f64,
    profile: &TransformProfile,
    s: f64,
    q: Vector2<f64>,
) -> Result<Local> {
    let t = profile.matrix(s);
    let q_big = t * q;
    let dq = profile.derivative(s) * q;
    let gamma = 1.0 - kappa * q_big.x;
    if gamma <= 0.0 {
        return Err(Error::CoordinateBreakdown { s, gamma });
    }
    let xi = Vector2::new(dq.x - tau * q_big.y, dq.y + tau * q_big.x);
    Ok(Local {
        t,
        q_big,
        gamma,
        xi,
    })
}

/// R = r(s) + (t̄₁·q′)n + (t̄₂·q′)b.
pub fn embed_point(
    curve: &CurveSpec,
    profile: &TransformProfile,
    q: Vector2<f64>,
    s: f64,
) -> Result<Vector3<f64>> {
    let p = curve.evaluate(s)?;
    let l = local(p.curvature, p.torsion, profile, s, q)?;
    Ok(p.position + p.frame.n * l.q_big.x + p.frame.b * l.q_big.y)
}

/// Closed-form metric, determinant, inverse and gauge vector.
pub fn metric_tensor(
    curve: &CurveSpec,
    profile: &TransformProfile,
    s: f64,
    q: Vector2<f64>,
) -> Result<MetricEvaluation> {
    let p = curve.evaluate(s)?;
    let l = local(p.curvature, p.torsion, profile, s, q)?;
    let det_t = l.t.determinant();
    if det_t == 0.0 {
        return Err(Error::SingularTransform { s, det: det_t });
    }
    let c1 = l.t.column(0).into_owned();
    let c2 = l.t.column(1).into_owned();
    let xi = l.xi;
    let gamma = l.gamma;

    let mut g = Matrix3::zeros();
    g[(0, 0)] = c1.dot(&c1);
    g[(0, 1)] = c1.dot(&c2);
    g[(1, 1)] = c2.dot(&c2);
    g[(0, 2)] = xi.dot(&c1);
    g[(1, 2)] = xi.dot(&c2);
    g[(2, 2)] = gamma * gamma + xi.dot(&xi);
    g[(1, 0)] = g[(0, 1)];
    g[(2, 0)] = g[(0, 2)];
    g[(2, 1)] = g[(1, 2)];

    // ξ̄ = iσ_y ξ and 𝒜ᵃ = εᵃᶜ t̃_c·ξ̄.
    let xi_bar = Vector2::new(xi.y, -xi.x);
    let gauge = Vector2::new(c2.dot(&xi_bar), -c1.dot(&xi_bar));

    let g2 = gamma * gamma;
    let gsa = gauge / (g2 * det_t);
    // (εᵃᶜ t̃_c)·(εᵇᵈ t̃_d) with ε¹ᶜt̃_c = t̃₂ and ε²ᶜt̃_c = −t̃₁.
    let eps_t = [c2, -c1];
    let mut g_inv = Matrix3::zeros();
    g_inv[(2, 2)] = 1.0 / g2;
    for a in 0..2 {
        g_inv[(a, 2)] = gsa[a];
        g_inv[(2, a)] = gsa[a];
        for b in 0..2 {
            g_inv[(a, b)] = g2 * gsa[a] * gsa[b] + eps_t[a].dot(&eps_t[b]) / (det_t * det_t);
        }
    }

    Ok(MetricEvaluation {
        g,
        det_g: g2 * det_t * det_t,
        g_inv,
        gauge,
        gamma,
        xi,
    })
}

/// ∂_a𝒜ᵃ. 𝒜 is linear in q′ with trace −∂_s|𝕋|, so the divergence is
/// independent of the transverse position and of the axis.
pub fn gauge_divergence(profile: &TransformProfile, s: f64) -> f64 {
    -profile.det_derivative(s, 1)
}

/// Brute-force ∂_iR·∂_jR from fourth-order central differences of
/// [`embed_point`] with step `h` in every coordinate.
pub fn metric_by_differences(
    curve: &CurveSpec,
    profile: &TransformProfile,
    s: f64,
    q: Vector2<f64>,
    h: f64,
) -> Result<Matrix3<f64>> {
    let at = |dq1: f64, dq2: f64, ds: f64| {
        embed_point(curve, profile, q + Vector2::new(dq1, dq2), s + ds)
    };
    let mut grads = [Vector3::zeros(); 3];
    for (i, grad) in grads.iter_mut().enumerate() {
        let shift = |k: f64| {
            let mut d = [0.0; 3];
            d[i] = k * h;
            at(d[0], d[1], d[2])
        };
        *grad = (shift(-2.0)? - shift(-1.0)? * 8.0 + shift(1.0)? * 8.0 - shift(2.0)?) / (12.0 * h);
    }
    Ok(Matrix3::from_fn(|i, j| grads[i].dot(&grads[j])))
}

/// ∂_a𝒜ᵃ from central differences of the closed-form gauge vector.
pub fn gauge_divergence_by_differences(
    curve: &CurveSpec,
    profile: &TransformProfile,
    s: f64,
    q: Vector2<f64>,
    h: f64,
) -> Result<f64> {
    let mut div = 0.0;
    for a in 0..2 {
        let mut e = Vector2::zeros();
        e[a] = h;
        let plus = metric_tensor(curve, profile, s, q + e)?.gauge[a];
        let minus = metric_tensor(curve, profile, s, q - e)?.gauge[a];
        div += (plus - minus) / (2.0 * h);
    }
    Ok(div)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ScalarFn;
    use approx::assert_abs_diff_eq;

    #[test]
    fn flat_identity_metric() {
        // κ → 0 limit: a helix of huge rise is locally straight; use torsion-free circle of
        // enormous radius instead to keep κ > 0.
        let curve = CurveSpec::helix(1e12, 0.0).unwrap();
        let m = metric_tensor(&curve, &TransformProfile::identity(), 0.0, Vector2::new(0.1, 0.2))
            .unwrap();
        assert_abs_diff_eq!(m.g, Matrix3::identity(), epsilon = 1e-12);
        assert_abs_diff_eq!(m.det_g, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn identity_transform_gauge_is_torsion_rotation() {
        let curve = CurveSpec::helix(1.0, 0.5).unwrap();
        let tau = 0.5 / 1.25;
        let q = Vector2::new(0.1, -0.2);
        let m = metric_tensor(&curve, &TransformProfile::identity(), 0.7, q).unwrap();
        assert_abs_diff_eq!(m.gauge.x, tau * q.y, epsilon = 1e-15);
        assert_abs_diff_eq!(m.gauge.y, -tau * q.x, epsilon = 1e-15);
    }

    #[test]
    fn on_axis_embedding_is_axis() {
        let curve = CurveSpec::helix(2.0, 1.0).unwrap();
        let p = TransformProfile::squeeze(0.1, ScalarFn::sine(1.0, 3.0));
        let r = embed_point(&curve, &p, Vector2::zeros(), 1.1).unwrap();
        assert_eq!(r, curve.evaluate(1.1).unwrap().position);
    }

    #[test]
    fn breakdown_beyond_curvature_radius() {
        let curve = CurveSpec::helix(1.0, 0.0).unwrap();
        let r = embed_point(&curve, &TransformProfile::identity(), Vector2::new(1.5, 0.0), 0.0);
        assert!(matches!(r, Err(Error::CoordinateBreakdown { .. })));
    }

    #[test]
    fn singular_transform_rejected() {
        let curve = CurveSpec::helix(1.0, 1.0).unwrap();
        let p = TransformProfile::scaling(1.0, ScalarFn::Const(-1.0), ScalarFn::Const(0.0));
        let r = metric_tensor(&curve, &p, 0.0, Vector2::new(0.0, 0.1));
        assert!(matches!(r, Err(Error::SingularTransform { .. })));
    }
}
