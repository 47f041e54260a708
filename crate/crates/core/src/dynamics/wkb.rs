use std::f64::consts::TAU;

use num_complex::Complex64;

use super::discretize::DiscreteOperator;
use super::eigen::Selection;
use crate::effective::EffectiveHamiltonian;
use crate::error::{Error, Result};
use crate::scalar::sample_points;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

/// Momentum of one branch; `coupling` is the σ_x coefficient 2fΔE.
fn momentum(branch: Branch, s: f64, e: f64, alpha: f64, coupling: f64) -> Result<f64> {
    let sg = branch.sign();
    let radicand = 2.0 * (e - sg * coupling) - alpha * alpha;
    if !(radicand > 0.0) {
        return Err(Error::TurningPoint {
            s,
            branch: branch.symbol(),
            radicand,
        });
    }
    Ok(sg * (alpha + radicand.sqrt()))
}

/// p± = ±α ± √(2(E ∓ 2fΔE) − α²), with `coupling` = 2fΔE.
pub fn wkb_momenta(e: f64, alpha: f64, coupling: f64) -> Result<(f64, f64)> {
    if e < 10.0 * coupling.abs().max(0.5 * alpha * alpha) {
        log::warn!("E = {e} is not large against |2f dE| = {} and alpha^2/2", coupling.abs());
    }
    Ok((
        momentum(Branch::Plus, f64::NAN, e, alpha, coupling)?,
        momentum(Branch::Minus, f64::NAN, e, alpha, coupling)?,
    ))
}

/// Local WKB data of one branch at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbSample {
    pub s: f64,
    pub p: f64,
    /// σ_z coefficient of the local symbol, −αp.
    pub b: f64,
    /// σ_x coefficient 2fΔE.
    pub g: f64,
    /// Λ = √(g² + b²)
    pub lambda: f64,
    /// real unit spinor
    pub u: [f64; 2],
    /// |p ∓ α|, the local wavenumber about the gauge shift
    pub speed: f64,
}

/// Spinor u± and momentum of `branch` at `s`.
///
/// u₊ is the +Λ eigenvector of bσ_z + gσ_x, u₋ the −Λ one.
pub fn wkb_spinor(s: f64, branch: Branch, h: &EffectiveHamiltonian, e: f64) -> Result<WkbSample> {
    let alpha = h.alpha(s);
    let g = h.coupling(s);
    let p = momentum(branch, s, e, alpha, g)?;
    let b = -alpha * p;
    let lambda = g.hypot(b);
    // Λ − b without cancellation
    let gap = if b > 0.0 { g * g / (lambda + b) } else { lambda - b };
    let value = lambda * gap;
    if !(value > 0.0) {
        return Err(Error::DegenerateSpinor { s, value });
    }
    let v = if b > 0.0 {
        [g.signum(), g.abs() / (lambda + b)]
    } else {
        [g, gap]
    };
    let norm = v[0].hypot(v[1]);
    let v = [v[0] / norm, v[1] / norm];
    let u = match branch {
        Branch::Plus => v,
        Branch::Minus => [-v[1], v[0]],
    };
    Ok(WkbSample {
        s,
        p,
        b,
        g,
        lambda,
        u,
        speed: (p - branch.sign() * alpha).abs(),
    })
}

/// Spinor at `s`, or its one-sided limit from larger s where the gauge of
/// the spinor is undefined (g = 0 with b > 0). If g vanishes there too the
/// g → 0⁺ limit is used.
pub(crate) fn spinor_or_limit(
    s: f64,
    branch: Branch,
    h: &EffectiveHamiltonian,
    e: f64,
    span: f64,
) -> Result<WkbSample> {
    match wkb_spinor(s, branch, h, e) {
        Err(Error::DegenerateSpinor { value, .. }) => match wkb_spinor(s + 1e-9 * span, branch, h, e) {
            Ok(mut w) => {
                w.s = s;
                Ok(w)
            }
            Err(Error::DegenerateSpinor { .. }) => {
                let alpha = h.alpha(s);
                let p = momentum(branch, s, e, alpha, 0.0)?;
                let b = -alpha * p;
                if b == 0.0 {
                    return Err(Error::DegenerateSpinor { s, value });
                }
                let u = match branch {
                    Branch::Plus => [1.0, 0.0],
                    Branch::Minus => [0.0, 1.0],
                };
                Ok(WkbSample {
                    s,
                    p,
                    b,
                    g: 0.0,
                    lambda: b.abs(),
                    u,
                    speed: (p - branch.sign() * alpha).abs(),
                })
            }
            other => other,
        },
        other => other,
    }
}

/// One WKB branch sampled on `[0, s0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WkbBranch {
    pub branch: Branch,
    pub samples: Vec<WkbSample>,
    /// ∫₀ˢ p ds
    pub phase: Vec<f64>,
    /// C/√|p ∓ α|
    pub amplitude: Vec<f64>,
    /// C, fixed by ∫|u|²·amplitude² ds = 1
    pub c: f64,
}

fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for i in 1..x.len() {
        out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    }
    out
}

pub fn wkb_branch(h: &EffectiveHamiltonian, e: f64, branch: Branch, s0: f64, points: usize) -> Result<WkbBranch> {
    if h.dim != 2 {
        return Err(Error::Unsupported("WKB branches need a two-level Hamiltonian".into()));
    }
    let s: Vec<f64> = sample_points(0.0, s0, points.max(2)).collect();
    let samples = s
        .iter()
        .map(|&x| spinor_or_limit(x, branch, h, e, s0))
        .collect::<Result<Vec<_>>>()?;
    let p: Vec<f64> = samples.iter().map(|w| w.p).collect();
    let inv: Vec<f64> = samples.iter().map(|w| 1.0 / w.speed).collect();
    let phase = cumulative_trapezoid(&s, &p);
    let total = *cumulative_trapezoid(&s, &inv).last().unwrap_or(&0.0);
    let c = total.powf(-0.5);
    let amplitude = samples.iter().map(|w| c / w.speed.sqrt()).collect();
    Ok(WkbBranch {
        branch,
        samples,
        phase,
        amplitude,
        c,
    })
}

/// Size of what the two-branch WKB ansatz leaves out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbDiagnostics {
    /// max over s of |u∓ · ∂_s u±|
    pub branch_coupling: f64,
    pub max_alpha_derivative: f64,
    /// min over s of E / max(|2fΔE|, α²/2)
    pub energy_ratio: f64,
}

impl WkbBranch {
    pub fn s(&self) -> Vec<f64> {
        self.samples.iter().map(|w| w.s).collect()
    }
}

pub fn wkb_diagnostics(h: &EffectiveHamiltonian, e: f64, s0: f64, points: usize) -> Result<WkbDiagnostics> {
    let plus = wkb_branch(h, e, Branch::Plus, s0, points)?;
    let minus = wkb_branch(h, e, Branch::Minus, s0, points)?;
    let n = plus.samples.len();
    let mut coupling: f64 = 0.0;
    for i in 1..n - 1 {
        let ds = plus.samples[i + 1].s - plus.samples[i - 1].s;
        for (a, b) in [(&plus, &minus), (&minus, &plus)] {
            // the spinor gauge flips sign where g does; undo that before differencing
            let (prev, next) = (a.samples[i - 1].u, a.samples[i + 1].u);
            let sign = if prev[0] * next[0] + prev[1] * next[1] < 0.0 { -1.0 } else { 1.0 };
            let du = [(sign * next[0] - prev[0]) / ds, (sign * next[1] - prev[1]) / ds];
            let other = b.samples[i].u;
            coupling = coupling.max((other[0] * du[0] + other[1] * du[1]).abs());
        }
    }
    let mut dmax: f64 = 0.0;
    let mut ratio = f64::INFINITY;
    for s in sample_points(0.0, s0, points.max(2)) {
        dmax = dmax.max(h.alpha_derivative(s).abs());
        let a = h.alpha(s);
        ratio = ratio.min(e / h.coupling(s).abs().max(0.5 * a * a));
    }
    Ok(WkbDiagnostics {
        branch_coupling: coupling,
        max_alpha_derivative: dmax,
        energy_ratio: ratio,
    })
}

/// Gap between counter-propagating levels of the + branch near E from
/// Bohr–Sommerfeld quantisation of the momenta p = α ± S, S = √(2(E − g) − α²):
/// ΔE = |∮2α ds| / ∮S⁻¹ ds over the periodic tube of length s0.
pub fn predicted_splitting(h: &EffectiveHamiltonian, e: f64, s0: f64, points: usize) -> Result<f64> {
    let n = points.max(16);
    let ds = s0 / n as f64;
    let (mut gauge, mut time) = (0.0, 0.0);
    for j in 0..n {
        let s = j as f64 * ds;
        let a = h.alpha(s);
        let g = if h.dim == 2 { h.coupling(s) } else { 0.0 };
        let p = momentum(Branch::Plus, s, e, a, g)?;
        gauge += 2.0 * a * ds;
        time += ds / (p - a);
    }
    Ok(gauge.abs() / time)
}

/// Eigensolver side of the splitting comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredSplitting {
    pub splitting: f64,
    /// Ring harmonic |m| shared by the four levels.
    pub harmonic: i64,
    /// The two doublets, ascending.
    pub levels: [f64; 4],
    /// Every computed level with its dominant |m|.
    pub spectrum: Vec<(f64, i64)>,
}

/// Dominant |m| of an eigenvector on a periodic grid, searched in `window`.
fn dominant_harmonic(v: &nalgebra::DVector<Complex64>, dim: usize, window: std::ops::RangeInclusive<i64>) -> i64 {
    let n = v.len() / dim;
    let mut best = (0, -1.0);
    for m in window {
        let mut power = 0.0;
        for sgn in [1.0, -1.0] {
            let w = Complex64::from_polar(1.0, -sgn * TAU * m as f64 / n as f64);
            for c in 0..dim {
                let (mut acc, mut phase) = (Complex64::default(), Complex64::new(1.0, 0.0));
                for j in 0..n {
                    acc += v[j * dim + c] * phase;
                    phase *= w;
                }
                power += acc.norm_sqr();
            }
        }
        if power > best.1 {
            best = (m, power);
        }
    }
    best.0
}

/// Finds the four levels near `e` sharing the ring harmonic of the level
/// closest to `e`; the splitting is the distance between the means of the two
/// degenerate pairs.
pub fn measured_splitting(op: &DiscreteOperator, e: f64, count: usize) -> Result<MeasuredSplitting> {
    let s0 = op.grid.length;
    let spec = op.eigensolve(Selection::Nearest { target: e, count })?;
    let k0 = ((2.0 * e).sqrt() * s0 / TAU).round() as i64;
    let window = (k0 - 10).max(0)..=k0 + 10;
    let tagged: Vec<(f64, i64)> = spec
        .values
        .iter()
        .zip(&spec.vectors)
        .map(|(&val, v)| (val, dominant_harmonic(v, op.dim, window.clone())))
        .collect();
    let nearest = tagged
        .iter()
        .min_by(|a, b| (a.0 - e).abs().total_cmp(&(b.0 - e).abs()))
        .ok_or_else(|| Error::Eigen("no eigenvalues near the target".into()))?;
    let m = nearest.1;
    let mut group: Vec<f64> = tagged.iter().filter(|t| t.1 == m).map(|t| t.0).collect();
    if group.len() < 4 {
        return Err(Error::Eigen(format!(
            "found {} levels with harmonic {m} near E = {e}; need 4",
            group.len()
        )));
    }
    group.sort_by(|a, b| (a - e).abs().total_cmp(&(b - e).abs()));
    group.truncate(4);
    group.sort_by(f64::total_cmp);
    let levels = [group[0], group[1], group[2], group[3]];
    Ok(MeasuredSplitting {
        splitting: 0.5 * (levels[2] + levels[3]) - 0.5 * (levels[0] + levels[1]),
        harmonic: m,
        levels,
        spectrum: tagged,
    })
}
