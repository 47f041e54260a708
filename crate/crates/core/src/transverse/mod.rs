//! Transverse eigenmodes of square and circular cross sections, the
//! angular-momentum expectation ⟨L⟩ and quadrature oracles.

mod bessel;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::simpson;

pub use bessel::{bessel_j, bessel_zero};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CrossSection {
    Square { side: f64 },
    Circular { radius: f64 },
}

impl CrossSection {
    pub fn validate(&self) -> Result<()> {
        let size = match self {
            CrossSection::Square { side } => side,
            CrossSection::Circular { radius } => radius,
        };
        if *size > 0.0 && size.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "cross-section size must be positive, got {size}"
            )))
        }
    }

    /// Largest distance from the axis inside the cross section.
    pub fn q_max(&self) -> f64 {
        match self {
            CrossSection::Square { side } => side / std::f64::consts::SQRT_2,
            CrossSection::Circular { radius } => *radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransverseMode {
    Square {
        side: f64,
        n1: u32,
        n2: u32,
        e1: f64,
        e2: f64,
        l_exp: f64,
    },
    Circular {
        radius: f64,
        n: u32,
        l: i32,
        energy: f64,
    },
}

impl TransverseMode {
    /// ⟨L⟩/ħ of the mode (the |+⟩ member for square pairs).
    pub fn l_exp(&self) -> f64 {
        match self {
            TransverseMode::Square { l_exp, .. } => *l_exp,
            TransverseMode::Circular { l, .. } => *l as f64,
        }
    }

    /// Transverse energy E_{n₁} + E_{n₂} or E_{n,l}.
    pub fn energy(&self) -> f64 {
        match self {
            TransverseMode::Square { e1, e2, .. } => e1 + e2,
            TransverseMode::Circular { energy, .. } => *energy,
        }
    }
}

/// Particle-in-a-box level (nπ/d)²/2.
pub fn box_energy(n: u32, side: f64) -> f64 {
    let k = n as f64 * PI / side;
    0.5 * k * k
}

pub fn square_mode(side: f64, n1: u32, n2: u32) -> Result<TransverseMode> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidMode(format!(
            "square quantum numbers must be >= 1, got ({n1}, {n2})"
        )));
    }
    if !(side > 0.0) {
        return Err(Error::InvalidInput(format!("side must be positive, got {side}")));
    }
    Ok(TransverseMode::Square {
        side,
        n1,
        n2,
        e1: box_energy(n1, side),
        e2: box_energy(n2, side),
        l_exp: angular_expectation(n1, n2),
    })
}

pub fn circular_mode(radius: f64, n: u32, l: i32) -> Result<TransverseMode> {
    if n == 0 {
        return Err(Error::InvalidMode("radial quantum number must be >= 1".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    let j = bessel_zero(l, n)?;
    Ok(TransverseMode::Circular {
        radius,
        n,
        l,
        energy: j * j / (2.0 * radius * radius),
    })
}

/// Closed form of ⟨+|L|+⟩/ħ for the square pair (n₁, n₂); zero for n₁ = n₂.
pub fn angular_expectation(n1: u32, n2: u32) -> f64 {
    if n1 == n2 || (n1 + n2) % 2 == 0 {
        return 0.0;
    }
    let (a, b) = ((n1 * n1) as f64, (n2 * n2) as f64);
    // [−1 + (−1)^{n₁+n₂}]² = 4 for odd sums.
    16.0 * a * b * 4.0 / ((a - b).powi(3) * PI * PI)
}

/// Degenerate square pair |±⟩ = (|n₁n₂⟩ ± i|n₂n₁⟩)/√2 of side `side`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquarePair {
    pub n1: u32,
    pub n2: u32,
    pub side: f64,
}

impl SquarePair {
    pub fn new(n1: u32, n2: u32, side: f64) -> Result<Self> {
        square_mode(side, n1, n2)?;
        if n1 == n2 {
            return Err(Error::NondegenerateSubspace { n: n1 });
        }
        Ok(SquarePair { n1, n2, side })
    }

    pub fn e1(&self) -> f64 {
        box_energy(self.n1, self.side)
    }

    pub fn e2(&self) -> f64 {
        box_energy(self.n2, self.side)
    }

    /// ΔE = E_{n₂} − E_{n₁}.
    pub fn delta_e(&self) -> f64 {
        self.e2() - self.e1()
    }

    pub fn l_exp(&self) -> f64 {
        angular_expectation(self.n1, self.n2)
    }

    pub fn mode(&self) -> TransverseMode {
        square_mode(self.side, self.n1, self.n2).expect("validated on construction")
    }

    /// (⟨q|+⟩, ⟨q|−⟩) at (q₁, q₂) in the centred box.
    pub fn states(&self, q1: f64, q2: f64) -> (Complex64, Complex64) {
        let d = self.side;
        let a = box_mode(self.n1, d, q1, 0) * box_mode(self.n2, d, q2, 0);
        let b = box_mode(self.n2, d, q1, 0) * box_mode(self.n1, d, q2, 0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        (Complex64::new(a, b) * r, Complex64::new(a, -b) * r)
    }
}

/// `order`-th derivative of √(2/d)·sin(nπq/d − nπ/2) on [−d/2, d/2].
pub fn box_mode(n: u32, d: f64, q: f64, order: u8) -> f64 {
    let k = n as f64 * PI / d;
    let x = k * q - n as f64 * PI / 2.0;
    let amp = (2.0 / d).sqrt() * k.powi(order as i32);
    match order % 4 {
        0 => amp * x.sin(),
        1 => amp * x.cos(),
        2 => -amp * x.sin(),
        _ => -amp * x.cos(),
    }
}

/// Samples of one product state and its derivatives on a Simpson grid.
struct Sampled {
    weights: Vec<f64>,
    nodes: Vec<f64>,
}

impl Sampled {
    fn new(d: f64, grid: usize) -> Self {
        let (nodes, weights) = simpson(-d / 2.0, d / 2.0, grid);
        Sampled { weights, nodes }
    }

    /// ∫∫ conj(ψ_bra) · op(ψ_ket) over the square, with ψ = |n₁n₂⟩ ± i|n₂n₁⟩
    /// combinations expanded into product terms.
    fn integrate(&self, f: impl Fn(f64, f64) -> Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, wx) in self.nodes.iter().zip(&self.weights) {
            for (y, wy) in self.nodes.iter().zip(&self.weights) {
                acc += f(*x, *y) * (wx * wy);
            }
        }
        acc
    }
}

/// Components of |+⟩, |−⟩ and their first and second derivatives at a point.
struct Jet {
    /// [state][derivative index]: 0 value, 1 ∂₁, 2 ∂₂, 3 ∂₁², 4 ∂₂², 5 ∂₁∂₂
    v: [[Complex64; 6]; 2],
}

fn jet(n1: u32, n2: u32, d: f64, x: f64, y: f64) -> Jet {
    let prod = |a: u32, b: u32, ox: u8, oy: u8| box_mode(a, d, x, ox) * box_mode(b, d, y, oy);
    let orders = [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1)];
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = [[Complex64::new(0.0, 0.0); 6]; 2];
    for (k, (ox, oy)) in orders.iter().enumerate() {
        let a = prod(n1, n2, *ox, *oy);
        let b = prod(n2, n1, *ox, *oy);
        v[0][k] = Complex64::new(a, b) * r;
        v[1][k] = Complex64::new(a, -b) * r;
    }
    Jet { v }
}

/// ⟨+|L̂|+⟩/ħ with L̂ = iħ(q₂∂₁ − q₁∂₂), by 2-D composite Simpson quadrature
/// over the unit square with `grid` panels per axis.
pub fn angular_expectation_quadrature(n1: u32, n2: u32, grid: usize) -> f64 {
    let grid_ = Sampled::new(1.0, grid);
    let i = Complex64::i();
    grid_
        .integrate(|x, y| {
            let j = jet(n1, n2, 1.0, x, y);
            let plus = j.v[0];
            plus[0].conj() * i * (plus[1] * y - plus[2] * x)
        })
        .re
}

/// Matrix of V_H = −½[2W₁₁∂₂² + 2W₂₂∂₁² − 2(W₁₂+W₂₁)∂₁∂₂] in the (|+⟩, |−⟩)
/// basis by 2-D Simpson quadrature; `w` is 𝕎 at a fixed s, row-major.
pub fn deformation_matrix_quadrature(
    w: [[f64; 2]; 2],
    pair: &SquarePair,
    grid: usize,
) -> [[Complex64; 2]; 2] {
    let sampled = Sampled::new(pair.side, grid);
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (bra, row) in out.iter_mut().enumerate() {
        for (ket, cell) in row.iter_mut().enumerate() {
            *cell = sampled.integrate(|x, y| {
                let j = jet(pair.n1, pair.n2, pair.side, x, y);
                let k = j.v[ket];
                let op = -(k[4] * (2.0 * w[0][0]) + k[3] * (2.0 * w[1][1])
                    - k[5] * (2.0 * (w[0][1] + w[1][0])))
                    * 0.5;
                j.v[bra][0].conj() * op
            });
        }
    }
    out
}

/// Coefficients (c₀, c_x, c_y, c_z) of a 2×2 matrix on (I, σ_x, σ_y, σ_z).
pub fn pauli_components(m: &[[Complex64; 2]; 2]) -> [f64; 4] {
    [
        0.5 * (m[0][0] + m[1][1]).re,
        0.5 * (m[0][1] + m[1][0]).re,
        0.5 * (m[1][0] - m[0][1]).im,
        0.5 * (m[0][0] - m[1][1]).re,
    ]
}
