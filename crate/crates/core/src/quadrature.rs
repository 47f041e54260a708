//! Quadrature rules shared by the transverse and qgt modules.

use std::f64::consts::PI;

/// Composite Simpson nodes and weights on `[a, b]` with `intervals` panels
/// (rounded up to the next even number).
pub fn simpson(a: f64, b: f64, intervals: usize) -> (Vec<f64>, Vec<f64>) {
    let n = (intervals.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let nodes = (0..=n).map(|i| a + h * i as f64).collect();
    let weights = (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect();
    (nodes, weights)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let (x, w) = simpson(-1.0, 2.0, 7);
        assert_eq!(x.len(), 9);
        let sum: f64 = x.iter().zip(&w).map(|(x, w)| w * (x * x * x - x + 2.0)).sum();
        assert_abs_diff_eq!(sum, 3.75 - 1.5 + 6.0, epsilon = 1e-13);
    }

    #[test]
    fn gauss_legendre_integrates_high_degree() {
        let (x, w) = gauss_legendre(10);
        let sum: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert_abs_diff_eq!(sum, 2.0 / 19.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        let (x5, _) = gauss_legendre(5);
        assert_abs_diff_eq!(x5[2], 0.0, epsilon = 1e-15);
    }
}
