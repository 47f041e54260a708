//! Hermitian eigensolver for banded matrices.
//!
//! Band → real symmetric tridiagonal by Givens bulge chasing, eigenvalues by
//! implicit QL, eigenvectors by inverse iteration on the original band.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Hermitian matrix with `bandwidth` sub-diagonals, lower triangle stored.
///
/// One extra diagonal is kept so the reduction has room for its bulge.
#[derive(Debug, Clone)]
pub struct BandedHermitian {
    n: usize,
    bandwidth: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl BandedHermitian {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let bandwidth = bandwidth.min(n.saturating_sub(1));
        let width = bandwidth + 1;
        BandedHermitian {
            n,
            bandwidth,
            width,
            data: vec![ZERO; n * (width + 1)],
        }
    }

    /// Checks Hermiticity of a dense matrix and stores it with full bandwidth.
    pub fn from_dense(m: &DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidInput(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        let residual = hermitian_residual(m);
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if residual > 1e-10 * scale {
            return Err(Error::NotHermitian { residual });
        }
        let b = (0..n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .filter(|&(i, j)| m[(i, j)] != ZERO)
            .map(|(i, j)| i - j)
            .max()
            .unwrap_or(0);
        let mut out = Self::zeros(n, b);
        for j in 0..n {
            for i in j..n.min(j + b + 1) {
                let v = if i == j {
                    Complex64::new(m[(i, i)].re, 0.0)
                } else {
                    (m[(i, j)] + m[(j, i)].conj()) * 0.5
                };
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        debug_assert!(i >= j);
        (i - j <= self.width).then(|| j * (self.width + 1) + (i - j))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i >= j {
            self.slot(i, j).map_or(ZERO, |k| self.data[k])
        } else {
            self.slot(j, i).map_or(ZERO, |k| self.data[k].conj())
        }
    }

    /// Sets entry (i, j) and, implicitly, its conjugate partner.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let (k, v) = if i >= j {
            (self.slot(i, j), v)
        } else {
            (self.slot(j, i), v.conj())
        };
        match k {
            Some(k) => self.data[k] = v,
            None => debug_assert!(v.norm() < 1e-12, "write outside band at ({i},{j})"),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn matvec(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        let b = self.bandwidth;
        DVector::from_fn(self.n, |i, _| {
            let lo = i.saturating_sub(b);
            let hi = (i + b).min(self.n - 1);
            (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
        })
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let b = self.bandwidth;
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(b);
                let hi = (i + b).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j).norm()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Applies A ← G A G† with G = [[c, s], [−s̄, c]] acting on rows/columns
    /// (p, p+1).
    fn rotate(&mut self, p: usize, c: f64, s: Complex64) {
        let q = p + 1;
        let lo = p.saturating_sub(self.width);
        let hi = (q + self.width).min(self.n - 1);
        for j in lo..=hi {
            if j == p || j == q {
                continue;
            }
            let x = self.get(p, j);
            let y = self.get(q, j);
            self.set(p, j, x * c + s * y);
            self.set(q, j, -s.conj() * x + y * c);
        }
        let (app, aqq, aqp) = (self.get(p, p).re, self.get(q, q).re, self.get(q, p));
        // G M G† for the 2×2 block.
        let s2 = s.norm_sqr();
        let cross = (s * aqp).re;
        let npp = c * c * app + 2.0 * c * cross + s2 * aqq;
        let nqq = s2 * app - 2.0 * c * cross + c * c * aqq;
        let nqp = c * c * aqp - s.conj() * s.conj() * aqp.conj() + s.conj() * c * (aqq - app);
        self.set(p, p, Complex64::new(npp, 0.0));
        self.set(q, q, Complex64::new(nqq, 0.0));
        self.set(q, p, nqp);
    }

    /// Rotation on rows (p, p+1) that zeroes entry (p+1, col).
    fn annihilate(&mut self, p: usize, col: usize) {
        let a = self.get(p, col);
        let b = self.get(p + 1, col);
        if b == ZERO {
            return;
        }
        let (c, s) = if a == ZERO {
            (0.0, Complex64::new(1.0, 0.0))
        } else {
            let r = a.norm().hypot(b.norm());
            (a.norm() / r, a * b.conj() / (a.norm() * r))
        };
        self.rotate(p, c, s);
        self.set(p + 1, col, ZERO);
    }

    /// Unitary reduction to a real symmetric tridiagonal (diagonal, |sub-diagonal|).
    pub fn tridiagonalize(&self) -> (Vec<f64>, Vec<f64>) {
        let mut a = self.clone();
        let n = a.n;
        let b = a.bandwidth;
        for k in 0..n.saturating_sub(2) {
            for d in (2..=b).rev() {
                let i = k + d;
                if i >= n {
                    continue;
                }
                a.annihilate(i - 1, k);
                // chase the fill at (r, r-b-1) down the band
                let mut r = i + b;
                while r < n {
                    a.annihilate(r - 1, r - 1 - b);
                    r += b;
                }
            }
        }
        let diag = (0..n).map(|i| a.get(i, i).re).collect();
        let off = (0..n.saturating_sub(1)).map(|i| a.get(i + 1, i).norm()).collect();
        (diag, off)
    }
}

fn hermitian_residual(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a real symmetric tridiagonal matrix by implicit QL, ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Eigen(format!("QL did not converge at index {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Which eigenpairs to return.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    Lowest(usize),
    /// The `count` eigenvalues closest to `target`, returned in ascending order.
    Nearest { target: f64, count: usize },
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Unit 2-norm eigenvectors, one per value.
    pub vectors: Vec<DVector<Complex64>>,
}

/// All eigenvalues, ascending.
pub fn eigenvalues(a: &BandedHermitian) -> Result<Vec<f64>> {
    let (d, e) = a.tridiagonalize();
    tridiagonal_eigenvalues(&d, &e)
}

pub fn eigensolve(a: &BandedHermitian, sel: Selection) -> Result<Spectrum> {
    let all = eigenvalues(a)?;
    let values: Vec<f64> = match sel {
        Selection::Lowest(k) => all.iter().copied().take(k).collect(),
        Selection::Nearest { target, count } => {
            let mut v = all.clone();
            v.sort_by(|x, y| (x - target).abs().total_cmp(&(y - target).abs()));
            v.truncate(count);
            v.sort_by(f64::total_cmp);
            v
        }
    };
    let vectors = inverse_iteration(a, &values)?;
    Ok(Spectrum { values, vectors })
}

/// Lowest `k` eigenpairs of a dense Hermitian matrix.
pub fn eigensolve_dense(m: &DMatrix<Complex64>, k: usize) -> Result<Spectrum> {
    eigensolve(&BandedHermitian::from_dense(m)?, Selection::Lowest(k))
}

/// LU of a band matrix with partial pivoting (kl sub-, kl + ku super-diagonals).
struct BandLu {
    n: usize,
    kl: usize,
    width: usize,
    rows: Vec<Complex64>,
    multipliers: Vec<Complex64>,
    pivots: Vec<usize>,
}

impl BandLu {
    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    fn factor(a: &BandedHermitian, shift: f64, floor: f64) -> Self {
        let n = a.n;
        let kl = a.bandwidth;
        let width = 3 * kl + 1;
        let mut lu = BandLu {
            n,
            kl,
            width,
            rows: vec![ZERO; n * width],
            multipliers: vec![ZERO; n * kl.max(1)],
            pivots: vec![0; n],
        };
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + kl).min(n - 1) {
                let mut v = a.get(i, j);
                if i == j {
                    v -= shift;
                }
                let k = lu.at(i, j);
                lu.rows[k] = v;
            }
        }
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let p = (k..=last)
                .max_by(|&x, &y| lu.rows[lu.at(x, k)].norm().total_cmp(&lu.rows[lu.at(y, k)].norm()))
                .unwrap_or(k);
            lu.pivots[k] = p;
            let right = (k + 2 * kl).min(n - 1);
            if p != k {
                for j in k..=right {
                    let (x, y) = (lu.at(k, j), lu.at(p, j));
                    lu.rows.swap(x, y);
                }
            }
            let kk = lu.at(k, k);
            if lu.rows[kk].norm() < floor {
                lu.rows[kk] = Complex64::new(floor, 0.0);
            }
            let pivot = lu.rows[kk];
            for i in k + 1..=last {
                let ik = lu.at(i, k);
                let m = lu.rows[ik] / pivot;
                lu.rows[ik] = ZERO;
                lu.multipliers[k * kl + (i - k - 1)] = m;
                if m == ZERO {
                    continue;
                }
                for j in k + 1..=right {
                    let (x, y) = (lu.at(i, j), lu.at(k, j));
                    let v = lu.rows[y];
                    lu.rows[x] -= m * v;
                }
            }
        }
        lu
    }

    fn solve(&self, b: &mut DVector<Complex64>) {
        let (n, kl) = (self.n, self.kl);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap_rows(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                b[i] -= self.multipliers[k * kl + (i - k - 1)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut v = b[k];
            for j in k + 1..=(k + 2 * kl).min(n - 1) {
                v -= self.rows[self.at(k, j)] * b[j];
            }
            b[k] = v / self.rows[self.at(k, k)];
        }
    }
}

fn start_vector(n: usize, seed: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(n, |i, _| {
        let x = (i as f64 + 1.0) * (0.7548776662466927 + seed as f64 * 0.5698402909980532);
        Complex64::new((x * 12.9898).sin() + 0.1, (x * 78.233).cos())
    });
    v.normalize()
}

/// Eigenvectors for accurate eigenvalues `values` (ascending); vectors of
/// close eigenvalues are orthogonalised against each other.
pub fn inverse_iteration(a: &BandedHermitian, values: &[f64]) -> Result<Vec<DVector<Complex64>>> {
    let n = a.n;
    let norm = a.norm_inf().max(f64::MIN_POSITIVE);
    let cluster_tol = 1e-3 * norm;
    let floor = f64::EPSILON * norm;
    let mut out: Vec<DVector<Complex64>> = Vec::with_capacity(values.len());
    for (idx, &lambda) in values.iter().enumerate() {
        let lu = BandLu::factor(a, lambda, floor);
        let cluster: Vec<usize> = (0..idx).filter(|&j| (values[j] - lambda).abs() < cluster_tol).collect();
        let mut v = start_vector(n, idx);
        let mut converged = false;
        for _ in 0..8 {
            let mut x = v.clone();
            lu.solve(&mut x);
            for _ in 0..2 {
                for &j in &cluster {
                    let proj = out[j].dotc(&x);
                    x.axpy(-proj, &out[j], Complex64::new(1.0, 0.0));
                }
            }
            let growth = x.norm();
            if !growth.is_finite() || growth == 0.0 {
                return Err(Error::Eigen(format!("inverse iteration broke down at {lambda}")));
            }
            v = x / Complex64::new(growth, 0.0);
            let mut r = a.matvec(&v);
            r.axpy(Complex64::new(-lambda, 0.0), &v, Complex64::new(1.0, 0.0));
            if r.norm() <= 1e-11 * norm {
                converged = true;
                break;
            }
        }
        if !converged {
            let mut r = a.matvec(&v);
            r.axpy(Complex64::new(-lambda, 0.0), &v, Complex64::new(1.0, 0.0));
            if r.norm() > 1e-8 * norm {
                return Err(Error::Eigen(format!(
                    "eigenvector for {lambda} did not converge (residual {:e})",
                    r.norm()
                )));
            }
        }
        // fix the global phase: largest component real and positive
        let (imax, _) = v.iter().enumerate().fold((0, 0.0), |acc, (i, z)| {
            if z.norm() > acc.1 {
                (i, z.norm())
            } else {
                acc
            }
        });
        let phase = v[imax] / v[imax].norm();
        v /= phase;
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_band(n: usize, b: usize, seed: u64) -> DMatrix<Complex64> {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut m = DMatrix::from_element(n, n, ZERO);
        for i in 0..n {
            m[(i, i)] = c(next() * 4.0, 0.0);
            for j in i.saturating_sub(b)..i {
                let v = c(next(), next());
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        m
    }

    /// Eigenvalues of a Hermitian matrix via the real 2n×2n embedding.
    fn oracle(m: &DMatrix<Complex64>) -> Vec<f64> {
        let n = m.nrows();
        let real = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let z = m[(i % n, j % n)];
            match (i < n, j < n) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        });
        let mut v: Vec<f64> = SymmetricEigen::new(real).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v.into_iter().step_by(2).collect()
    }

    #[test]
    fn sigma_x() {
        let m = DMatrix::from_row_slice(2, 2, &[ZERO, c(1.0, 0.0), c(1.0, 0.0), ZERO]);
        let s = eigensolve_dense(&m, 2).unwrap();
        assert!((s.values[0] + 1.0).abs() < 1e-14 && (s.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn banded_matches_oracle() {
        for (n, b) in [(7, 1), (20, 3), (40, 5), (25, 24)] {
            let m = random_band(n, b, n as u64 * 31 + b as u64);
            let got = eigenvalues(&BandedHermitian::from_dense(&m).unwrap()).unwrap();
            let want = oracle(&m);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-11, "n={n} b={b}: {g} vs {w}");
            }
        }
    }

    #[test]
    fn vectors_are_orthonormal_eigenvectors() {
        let m = random_band(60, 4, 9);
        let a = BandedHermitian::from_dense(&m).unwrap();
        let s = eigensolve(&a, Selection::Nearest { target: 0.3, count: 6 }).unwrap();
        for (i, v) in s.vectors.iter().enumerate() {
            let r = &m * v - v * c(s.values[i], 0.0);
            assert!(r.norm() < 1e-10);
            for (j, w) in s.vectors.iter().enumerate() {
                let d = v.dotc(w).norm() - if i == j { 1.0 } else { 0.0 };
                assert!(d.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn degenerate_block_vectors() {
        let mut m = DMatrix::from_element(40, 40, ZERO);
        // two identical tridiagonal blocks, interleaved
        for i in 0..20 {
            m[(2 * i, 2 * i)] = c(2.0, 0.0);
            m[(2 * i + 1, 2 * i + 1)] = c(2.0, 0.0);
            if i + 1 < 20 {
                for o in 0..2 {
                    m[(2 * i + o, 2 * i + 2 + o)] = c(-1.0, 0.0);
                    m[(2 * i + 2 + o, 2 * i + o)] = c(-1.0, 0.0);
                }
            }
        }
        let s = eigensolve_dense(&m, 4).unwrap();
        assert!((s.values[0] - s.values[1]).abs() < 1e-12);
        assert!(s.vectors[0].dotc(&s.vectors[1]).norm() < 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[ZERO, c(1.0, 0.0), c(2.0, 0.0), ZERO]);
        assert!(matches!(eigensolve_dense(&m, 1), Err(Error::NotHermitian { .. })));
    }
}
