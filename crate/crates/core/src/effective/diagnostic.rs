use nalgebra::Vector2;

use crate::error::Result;
use crate::geometry::{gauge_divergence, metric_tensor, CurveSpec, TransformProfile};
use crate::scalar::sample_points;
use crate::transverse::CrossSection;

/// Size of the terms dropped by the leading-order expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionReport {
    pub delta_used: f64,
    /// max |V_T| over the sampled tube region.
    pub vt_estimate: f64,
    pub slow_var_ratio: f64,
}

/// Evaluates V_T over `grid` axial samples of `[0, s0]` and a `grid × grid`
/// transverse lattice of the √δ-rescaled cross section.
pub fn vt_diagnostic(
    curve: &CurveSpec,
    profile: &TransformProfile,
    cross: &CrossSection,
    s0: f64,
    grid: usize,
) -> Result<ExpansionReport> {
    let grid = grid.max(2);
    let scale = profile.delta.sqrt();
    let (half, disk) = match cross {
        CrossSection::Square { side } => (side / 2.0, false),
        CrossSection::Circular { radius } => (*radius, true),
    };
    let kappa = curve.curvature();
    let mut vt_max: f64 = 0.0;
    for s in sample_points(0.0, s0, grid) {
        let div = gauge_divergence(profile, s);
        let div_s = -profile.det_derivative(s, 2);
        if div == 0.0 && div_s == 0.0 {
            continue;
        }
        let t = profile.matrix(s);
        let dt = profile.derivative(s);
        let det = profile.det(s);
        let (k, dk) = (kappa.value(s), kappa.derivative(s));
        for q in sample_points(-half, half, grid).flat_map(|x| {
            sample_points(-half, half, grid).map(move |y| Vector2::new(x, y))
        }) {
            if disk && q.norm() > half {
                continue;
            }
            let q = q * scale;
            let m = metric_tensor(curve, profile, s, q)?;
            let gamma = m.gamma;
            let row1 = Vector2::new(t[(0, 0)], t[(0, 1)]);
            let dgamma = -dk * (t * q).x - k * (dt * q).x;
            let term1 = div * k * m.gauge.dot(&row1) / (2.0 * gamma.powi(3) * det * det);
            let term2 = div * div / (4.0 * gamma * gamma * det * det);
            // ∂_s(|𝕋|D/γ) with ∂_s|𝕋| = −D.
            let d_inner = (-div * div + det * div_s) / gamma - det * div * dgamma / (gamma * gamma);
            let term3 = d_inner / (2.0 * gamma * det * det);
            vt_max = vt_max.max((term1 + term2 + term3).abs());
        }
    }
    Ok(ExpansionReport {
        delta_used: profile.delta,
        vt_estimate: vt_max,
        slow_var_ratio: profile.slow_variation_ratio(s0, cross.q_max(), grid),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ScalarFn;

    #[test]
    fn rotation_has_no_vt() {
        let curve = CurveSpec::helix(25.0, 25.0).unwrap();
        let p = TransformProfile::rotation(ScalarFn::Linear {
            value: 0.0,
            slope: 0.02,
        });
        let r = vt_diagnostic(&curve, &p, &CrossSection::Square { side: 1.0 }, 15.0, 16).unwrap();
        assert_eq!(r.vt_estimate, 0.0);
    }

    #[test]
    fn zero_delta_has_no_vt() {
        let curve = CurveSpec::helix(25.0, 25.0).unwrap();
        let p = TransformProfile::scaling(0.0, ScalarFn::sine(1.0, 15.0), ScalarFn::sine(0.5, 15.0));
        let r = vt_diagnostic(&curve, &p, &CrossSection::Square { side: 1.0 }, 15.0, 16).unwrap();
        assert_eq!(r.vt_estimate, 0.0);
    }

    #[test]
    fn scaling_vt_is_small() {
        let curve = CurveSpec::helix(25.0, 25.0).unwrap();
        let p = TransformProfile::scaling(0.02, ScalarFn::sine(1.0, 15.0), ScalarFn::sine(0.5, 15.0));
        let r = vt_diagnostic(&curve, &p, &CrossSection::Square { side: 1.0 }, 15.0, 16).unwrap();
        assert!(r.vt_estimate > 0.0 && r.vt_estimate < 0.02, "{r:?}");
        assert!(r.slow_var_ratio < 0.1);
    }
}
