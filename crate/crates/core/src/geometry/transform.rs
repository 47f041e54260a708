use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{sample_points, ScalarFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Rotation,
    Scaling,
    Shearing,
    Combined,
}

/// Cross-section transformation field 𝕋(s) = R_θ(s)·(1 + δ𝕎(s)).
#[derive(Debug, Clone, PartialEq)]
pub struct TransformProfile {
    pub kind: TransformKind,
    pub delta: f64,
    pub theta: ScalarFn,
    /// Row-major 𝕎 entries.
    pub w: [[ScalarFn; 2]; 2],
}

impl TransformProfile {
    pub fn identity() -> Self {
        Self::rotation(ScalarFn::zero())
    }

    pub fn rotation(theta: ScalarFn) -> Self {
        TransformProfile {
            kind: TransformKind::Rotation,
            delta: 0.0,
            theta,
            w: zero_w(),
        }
    }

    /// 𝕎 = diag(f₁, f₂).
    pub fn scaling(delta: f64, f1: ScalarFn, f2: ScalarFn) -> Self {
        TransformProfile {
            kind: TransformKind::Scaling,
            delta,
            theta: ScalarFn::zero(),
            w: [[f1, ScalarFn::zero()], [ScalarFn::zero(), f2]],
        }
    }

    /// Area-preserving scaling, f₂ = −f₁.
    pub fn squeeze(delta: f64, f: ScalarFn) -> Self {
        let neg = f.scaled(-1.0);
        Self::scaling(delta, f, neg)
    }

    /// 𝕎₁₂ = f, every other entry zero.
    pub fn shearing(delta: f64, f: ScalarFn) -> Self {
        TransformProfile {
            kind: TransformKind::Shearing,
            delta,
            theta: ScalarFn::zero(),
            w: [[ScalarFn::zero(), f], [ScalarFn::zero(), ScalarFn::zero()]],
        }
    }

    /// Rotation by θ(s) composed with the squeeze diag(f, −f).
    pub fn combined(delta: f64, theta: ScalarFn, f: ScalarFn) -> Self {
        let mut p = Self::squeeze(delta, f);
        p.kind = TransformKind::Combined;
        p.theta = theta;
        p
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta.is_finite() || self.delta < 0.0 {
            return Err(Error::InvalidInput(format!(
                "delta must be finite and non-negative, got {}",
                self.delta
            )));
        }
        self.theta.validate()?;
        for f in self.w.iter().flatten() {
            f.validate()?;
        }
        Ok(())
    }

    /// Rotation rate ω = ∂_s θ.
    pub fn omega(&self, s: f64) -> f64 {
        self.theta.eval(s, 1)
    }

    fn w_at(&self, s: f64, order: u8) -> Matrix2<f64> {
        Matrix2::from_fn(|i, j| self.w[i][j].eval(s, order))
    }

    /// 𝕋(s).
    pub fn matrix(&self, s: f64) -> Matrix2<f64> {
        rotation(self.theta.value(s)) * (Matrix2::identity() + self.w_at(s, 0) * self.delta)
    }

    /// ∂_s 𝕋(s).
    pub fn derivative(&self, s: f64) -> Matrix2<f64> {
        let th = self.theta.value(s);
        let dth = self.theta.eval(s, 1);
        let r = rotation(th);
        let dr = rotation(th + std::f64::consts::FRAC_PI_2) * dth;
        dr * (Matrix2::identity() + self.w_at(s, 0) * self.delta) + r * self.w_at(s, 1) * self.delta
    }

    /// |𝕋| = det(1 + δ𝕎) (the rotation has unit determinant).
    pub fn det(&self, s: f64) -> f64 {
        let w = self.w_at(s, 0);
        let d = self.delta;
        1.0 + d * w.trace() + d * d * w.determinant()
    }

    /// `order`-th s-derivative of |𝕋| for order 1 or 2, expanded so that
    /// 𝕎 ≡ 0 gives exactly zero.
    pub fn det_derivative(&self, s: f64, order: u8) -> f64 {
        let d = self.delta;
        let w = |i: usize, j: usize, k: u8| self.w[i][j].eval(s, k);
        let trace = w(0, 0, order) + w(1, 1, order);
        let quad = match order {
            1 => w(0, 0, 1) * w(1, 1, 0) + w(0, 0, 0) * w(1, 1, 1)
                - w(0, 1, 1) * w(1, 0, 0)
                - w(0, 1, 0) * w(1, 0, 1),
            2 => w(0, 0, 2) * w(1, 1, 0) + 2.0 * w(0, 0, 1) * w(1, 1, 1) + w(0, 0, 0) * w(1, 1, 2)
                - w(0, 1, 2) * w(1, 0, 0)
                - 2.0 * w(0, 1, 1) * w(1, 0, 1)
                - w(0, 1, 0) * w(1, 0, 2),
            _ => panic!("det_derivative supports orders 1 and 2"),
        };
        d * trace + d * d * quad
    }

    /// max over `[0, s0]` of |∂_s T_ab|·δ·q_max; values above 0.1 break the
    /// slow-variation assumption.
    pub fn slow_variation_ratio(&self, s0: f64, q_max: f64, samples: usize) -> f64 {
        sample_points(0.0, s0, samples)
            .map(|s| self.derivative(s).amax())
            .fold(0.0, f64::max)
            * self.delta
            * q_max
    }
}

pub const SLOW_VARIATION_WARN: f64 = 0.1;

/// 𝕋 evaluated for a given profile at `s`.
pub fn transform_matrix(profile: &TransformProfile, s: f64) -> Matrix2<f64> {
    profile.matrix(s)
}

fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

fn zero_w() -> [[ScalarFn; 2]; 2] {
    [
        [ScalarFn::zero(), ScalarFn::zero()],
        [ScalarFn::zero(), ScalarFn::zero()],
    ]
}
