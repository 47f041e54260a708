use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::eigen::{self, BandedHermitian, Selection, Spectrum};
use super::grid::{Boundary, Grid1D};
use super::TwoLevelField;
use crate::effective::EffectiveHamiltonian;
use crate::error::{Error, Result};

/// Largest |α|h accepted by [`discretize`].
pub const MAX_ALPHA_STEP: f64 = std::f64::consts::FRAC_PI_4;
/// Fewest grid points per oscillation of α or V.
pub const MIN_POINTS_PER_WAVE: f64 = 8.0;

/// Finite-difference Hamiltonian on a [`Grid1D`].
///
/// Unknowns are numbered `site * dim + component` ("natural" order); the
/// banded copy uses a folded site order so that the periodic wrap stays
/// inside a narrow band.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub grid: Grid1D,
    pub dim: usize,
    /// banded position of each natural index
    position: Vec<usize>,
    band: BandedHermitian,
    entries: Vec<(usize, usize, Complex64)>,
}

fn site_order(grid: &Grid1D) -> Vec<usize> {
    let n = grid.points;
    match grid.bc {
        Boundary::Dirichlet => (0..n).collect(),
        Boundary::Periodic => {
            // 0, 1, n-1, 2, n-2, ...
            let mut order = Vec::with_capacity(n);
            order.push(0);
            let (mut lo, mut hi) = (1, n - 1);
            while lo <= hi {
                order.push(lo);
                if hi != lo {
                    order.push(hi);
                }
                lo += 1;
                hi -= 1;
            }
            order
        }
    }
}

/// Builds H = −½∂² + (i/2)σ{α, ∂} + α²/2 + V_g + V with second-order
/// central differences.
pub fn discretize(h: &EffectiveHamiltonian, grid: &Grid1D) -> Result<DiscreteOperator> {
    let n = grid.points;
    let step = grid.spacing();
    let s = grid.positions();
    let alpha: Vec<f64> = s.iter().map(|&x| h.alpha(x)).collect();
    let amax = alpha.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    if amax * step > MAX_ALPHA_STEP {
        return Err(Error::Resolution(format!(
            "|alpha| h = {:.3} exceeds {:.3}; use more points",
            amax * step,
            MAX_ALPHA_STEP
        )));
    }
    for wl in [h.alpha.wavelength(), h.potential.wavelength()].into_iter().flatten() {
        if wl / step < MIN_POINTS_PER_WAVE {
            return Err(Error::Resolution(format!(
                "oscillation length {wl} resolved by only {:.1} points",
                wl / step
            )));
        }
    }

    let dim = h.dim;
    let sigma = [1.0, -1.0];
    let idx = |site: usize, comp: usize| site * dim + comp;
    let mut entries = Vec::new();
    for j in 0..n {
        let vg = h.vg(s[j]);
        let v = h.vmat(s[j]);
        for c in 0..dim {
            let diag = 1.0 / (step * step) + 0.5 * alpha[j] * alpha[j] + vg + v[(c, c)].re;
            entries.push((idx(j, c), idx(j, c), Complex64::new(diag, 0.0)));
        }
        if dim == 2 {
            entries.push((idx(j, 0), idx(j, 1), v[(0, 1)]));
            entries.push((idx(j, 1), idx(j, 0), v[(1, 0)]));
        }
        let next = match (grid.bc, j + 1 == n) {
            (_, false) => Some(j + 1),
            (Boundary::Periodic, true) => Some(0),
            (Boundary::Dirichlet, true) => None,
        };
        if let Some(k) = next {
            for c in 0..dim {
                let drift = sigma[c] * (alpha[j] + alpha[k]) / (4.0 * step);
                let kin = -0.5 / (step * step);
                entries.push((idx(j, c), idx(k, c), Complex64::new(kin, drift)));
                entries.push((idx(k, c), idx(j, c), Complex64::new(kin, -drift)));
            }
        }
    }

    let mut position = vec![0; n * dim];
    for (p, &site) in site_order(grid).iter().enumerate() {
        for c in 0..dim {
            position[idx(site, c)] = p * dim + c;
        }
    }
    let bandwidth = match grid.bc {
        Boundary::Dirichlet => dim,
        Boundary::Periodic => 2 * dim + dim - 1,
    };
    let mut band = BandedHermitian::zeros(n * dim, bandwidth);
    for &(i, j, v) in &entries {
        let (pi, pj) = (position[i], position[j]);
        if pi >= pj {
            band.set(pi, pj, band.get(pi, pj) + v);
        }
    }
    let op = DiscreteOperator {
        grid: *grid,
        dim,
        position,
        band,
        entries,
    };
    let residual = op.hermiticity_residual();
    if residual > 1e-10 {
        return Err(Error::NotHermitian { residual });
    }
    Ok(op)
}

impl DiscreteOperator {
    pub fn size(&self) -> usize {
        self.grid.points * self.dim
    }

    /// max |M_ij − conj(M_ji)| over the assembled entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut sum: HashMap<(usize, usize), Complex64> = HashMap::new();
        for &(i, j, v) in &self.entries {
            *sum.entry((i, j)).or_default() += v;
        }
        sum.iter()
            .map(|(&(i, j), &v)| (v - sum.get(&(j, i)).copied().unwrap_or_default().conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Dense matrix in natural order.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.size();
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }

    pub fn banded(&self) -> &BandedHermitian {
        &self.band
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigen::eigenvalues(&self.band)
    }

    /// Eigenpairs with vectors in natural order.
    pub fn eigensolve(&self, sel: Selection) -> Result<Spectrum> {
        let mut spec = eigen::eigensolve(&self.band, sel)?;
        for v in spec.vectors.iter_mut() {
            *v = DVector::from_fn(v.len(), |i, _| v[self.position[i]]);
        }
        Ok(spec)
    }

    /// Eigenvector (natural order, unit 2-norm) as a field with ∫|φ|²ds = 1.
    pub fn field(&self, v: &DVector<Complex64>) -> TwoLevelField {
        let scale = 1.0 / self.grid.spacing().sqrt();
        let values = (0..self.grid.points)
            .map(|j| {
                let a = v[j * self.dim] * scale;
                let b = if self.dim == 2 { v[j * 2 + 1] * scale } else { Complex64::new(0.0, 0.0) };
                [a, b]
            })
            .collect();
        TwoLevelField {
            s: self.grid.positions(),
            values,
            weights: vec![self.grid.spacing(); self.grid.points],
        }
    }
}

/// Lowest `k` eigenpairs of the discretized operator.
pub fn eigensolve(op: &DiscreteOperator, k: usize) -> Result<Spectrum> {
    op.eigensolve(Selection::Lowest(k))
}
