//! Effective tangential Hamiltonians obtained by projecting onto a transverse
//! mode (or degenerate pair) of the tube.
//!
//! Every case is represented as
//! H = −½(∂_s − iα(s)σ_z)² + V_g(s) + V(s), with V a Hermitian 2×2 matrix
//! written on (I, σ_x, σ_y, σ_z). One-level cases use `dim == 1` and only the
//! identity part of V.

mod diagnostic;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::CurveSpec;
use crate::scalar::{Combination, ScalarFn};
use crate::transverse::{CrossSection, SquarePair, TransverseMode};

pub use diagnostic::{vt_diagnostic, ExpansionReport};

/// Curvature and torsion of the axis as functions of s.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub curvature: ScalarFn,
    pub torsion: ScalarFn,
}

impl Axis {
    pub fn of(curve: &CurveSpec) -> Self {
        Axis {
            curvature: curve.curvature(),
            torsion: curve.torsion(),
        }
    }

    pub fn constant(curvature: f64, torsion: f64) -> Self {
        Axis {
            curvature: ScalarFn::Const(curvature),
            torsion: ScalarFn::Const(torsion),
        }
    }
}

/// V_g = −ħ²κ²/8m.
pub fn geometric_potential(kappa: f64) -> f64 {
    -kappa * kappa / 8.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    RotationCircular,
    RotationSquare,
    ScalingCircular,
    ScalingSquare,
    ShearingCircular,
    ShearingSquare,
    Combined,
}

/// Pauli decomposition of the projected deformation potential.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PauliPotential {
    pub identity: Combination,
    pub x: Combination,
    pub y: Combination,
    pub z: Combination,
}

impl PauliPotential {
    pub fn is_zero(&self) -> bool {
        self.identity.is_zero() && self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn components(&self, s: f64) -> [f64; 4] {
        [
            self.identity.value(s),
            self.x.value(s),
            self.y.value(s),
            self.z.value(s),
        ]
    }

    /// Shortest oscillation length among the components.
    pub fn wavelength(&self) -> Option<f64> {
        [&self.identity, &self.x, &self.y, &self.z]
            .iter()
            .filter_map(|c| c.wavelength())
            .reduce(f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMeta {
    pub case: Case,
    /// Transverse mode; absent when only the angular quantum number is known.
    pub mode: Option<TransverseMode>,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonian {
    pub dim: usize,
    /// Gauge coupling multiplying σ_z (a plain scalar when `dim == 1`).
    pub alpha: Combination,
    pub curvature: ScalarFn,
    pub potential: PauliPotential,
    pub meta: HamiltonianMeta,
}

impl EffectiveHamiltonian {
    pub fn alpha(&self, s: f64) -> f64 {
        self.alpha.value(s)
    }

    pub fn alpha_derivative(&self, s: f64) -> f64 {
        self.alpha.derivative(s)
    }

    pub fn vg(&self, s: f64) -> f64 {
        geometric_potential(self.curvature.value(s))
    }

    /// V(s) in the (|+⟩, |−⟩) basis.
    pub fn vmat(&self, s: f64) -> Matrix2<Complex64> {
        let [c0, cx, cy, cz] = self.potential.components(s);
        let c = Complex64::new;
        Matrix2::new(c(c0 + cz, 0.0), c(cx, -cy), c(cx, cy), c(c0 - cz, 0.0))
    }

    /// σ_x coefficient of V(s), i.e. the coupling 2fΔE of the two-level problem.
    pub fn coupling(&self, s: f64) -> f64 {
        self.potential.x.value(s)
    }

    pub fn pair(&self) -> Option<SquarePair> {
        match self.meta.mode {
            Some(TransverseMode::Square { side, n1, n2, .. }) => SquarePair::new(n1, n2, side).ok(),
            _ => None,
        }
    }
}

fn one_level(
    axis: &Axis,
    alpha: Combination,
    identity: Combination,
    case: Case,
    mode: Option<TransverseMode>,
    delta: f64,
) -> EffectiveHamiltonian {
    EffectiveHamiltonian {
        dim: 1,
        alpha,
        curvature: axis.curvature.clone(),
        potential: PauliPotential {
            identity,
            ..Default::default()
        },
        meta: HamiltonianMeta { case, mode, delta },
    }
}

fn two_level(
    axis: &Axis,
    alpha: Combination,
    potential: PauliPotential,
    case: Case,
    pair: &SquarePair,
    delta: f64,
) -> EffectiveHamiltonian {
    EffectiveHamiltonian {
        dim: 2,
        alpha,
        curvature: axis.curvature.clone(),
        potential,
        meta: HamiltonianMeta {
            case,
            mode: Some(pair.mode()),
            delta,
        },
    }
}

/// (ω + τ)·L as a combination.
fn gauge(omega: &Combination, axis: &Axis, l: f64) -> Combination {
    omega.clone().scale(l).plus(l, &axis.torsion)
}

/// Circular cross section rotated at rate ω: α = (ω + τ)l, no deformation term.
pub fn assemble_rotation_circular(
    axis: &Axis,
    omega: &Combination,
    l: i32,
) -> EffectiveHamiltonian {
    one_level(
        axis,
        gauge(omega, axis, l as f64),
        Combination::zero(),
        Case::RotationCircular,
        None,
        0.0,
    )
}

/// Square cross section rotated at rate ω: α = (ω + τ)⟨L⟩ on σ_z, V = 0.
pub fn assemble_rotation_square(
    axis: &Axis,
    omega: &Combination,
    pair: &SquarePair,
) -> EffectiveHamiltonian {
    two_level(
        axis,
        gauge(omega, axis, pair.l_exp()),
        PauliPotential::default(),
        Case::RotationSquare,
        pair,
        0.0,
    )
}

/// Circular cross section scaled by diag(1 + δf₁, 1 + δf₂): V = δ(f₁+f₂)E_{n,l}.
pub fn assemble_scaling_circular(
    axis: &Axis,
    f1: &ScalarFn,
    f2: &ScalarFn,
    delta: f64,
    mode: &TransverseMode,
) -> Result<EffectiveHamiltonian> {
    let TransverseMode::Circular { l, energy, .. } = *mode else {
        return Err(Error::InvalidMode("circular scaling needs a circular mode".into()));
    };
    let identity = Combination::of(delta * energy, f1).plus(delta * energy, f2);
    Ok(one_level(
        axis,
        gauge(&Combination::zero(), axis, l as f64),
        identity,
        Case::ScalingCircular,
        Some(*mode),
        delta,
    ))
}

/// Square cross section scaled by diag(1 + δf₁, 1 + δf₂):
/// V = δ(f₁+f₂)(E₁+E₂)I + δ(f₁−f₂)(E₂−E₁)σ_x, α = τ⟨L⟩.
pub fn assemble_scaling_square(
    axis: &Axis,
    f1: &ScalarFn,
    f2: &ScalarFn,
    delta: f64,
    pair: &SquarePair,
) -> EffectiveHamiltonian {
    let sum = pair.e1() + pair.e2();
    let de = pair.delta_e();
    let potential = PauliPotential {
        identity: Combination::of(delta * sum, f1).plus(delta * sum, f2),
        x: Combination::of(delta * de, f1).plus(-delta * de, f2),
        ..Default::default()
    };
    two_level(
        axis,
        gauge(&Combination::zero(), axis, pair.l_exp()),
        potential,
        Case::ScalingSquare,
        pair,
        delta,
    )
}

/// σ_y coefficient of the projected shear V_H = f∂₁∂₂ per unit f.
///
/// Vanishes for even n₁ + n₂ (odd product integrand).
pub fn shear_coefficient(pair: &SquarePair) -> f64 {
    if (pair.n1 + pair.n2) % 2 == 0 {
        return 0.0;
    }
    let (a, b) = ((pair.n1 * pair.n1) as f64, (pair.n2 * pair.n2) as f64);
    let pi2 = std::f64::consts::PI.powi(2);
    -32.0 / pi2 * a * b * (pair.e1() + pair.e2()) / ((a - b).powi(2) * (a + b))
}

/// Shear 𝕎₁₂ = f: no effect on a circular cross section; on a square pair
/// V = c·f σ_y with c from [`shear_coefficient`]. α = τ⟨L⟩ (or τl).
pub fn assemble_shearing(
    axis: &Axis,
    f: &ScalarFn,
    cross: &CrossSection,
    mode: &TransverseMode,
) -> Result<EffectiveHamiltonian> {
    match (cross, mode) {
        (CrossSection::Circular { .. }, TransverseMode::Circular { l, .. }) => Ok(one_level(
            axis,
            gauge(&Combination::zero(), axis, *l as f64),
            Combination::zero(),
            Case::ShearingCircular,
            Some(*mode),
            0.0,
        )),
        (CrossSection::Square { side }, TransverseMode::Square { n1, n2, .. }) => {
            let pair = SquarePair::new(*n1, *n2, *side)?;
            let potential = PauliPotential {
                y: Combination::of(shear_coefficient(&pair), f),
                ..Default::default()
            };
            Ok(two_level(
                axis,
                gauge(&Combination::zero(), axis, pair.l_exp()),
                potential,
                Case::ShearingSquare,
                &pair,
                0.0,
            ))
        }
        _ => Err(Error::InvalidMode("cross section and mode kinds differ".into())),
    }
}

/// Rotation at rate ω together with the squeeze diag(f, −f) on a square pair:
/// α = (ω + τ)⟨L⟩ on σ_z and V = 2δfΔE σ_x (2fΔE σ_x when `include_delta`
/// is false).
pub fn assemble_combined(
    axis: &Axis,
    omega: &Combination,
    f: &ScalarFn,
    delta: f64,
    pair: &SquarePair,
    include_delta: bool,
) -> EffectiveHamiltonian {
    let scale = if include_delta { delta } else { 1.0 };
    let potential = PauliPotential {
        x: Combination::of(2.0 * scale * pair.delta_e(), f),
        ..Default::default()
    };
    two_level(
        axis,
        gauge(omega, axis, pair.l_exp()),
        potential,
        Case::Combined,
        pair,
        delta,
    )
}
