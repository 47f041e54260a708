//! Scalar functions of the arc length `s` used for θ(s), f(s), κ(s), τ(s).

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A smooth function of `s` with analytic derivatives up to third order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarFn {
    Const(f64),
    Linear {
        value: f64,
        slope: f64,
    },
    /// `amplitude * sin(2π s / period + phase)`
    Sine {
        amplitude: f64,
        period: f64,
        #[serde(default)]
        phase: f64,
    },
    Tabulated(Pchip),
}

impl ScalarFn {
    pub fn zero() -> Self {
        ScalarFn::Const(0.0)
    }

    pub fn sine(amplitude: f64, period: f64) -> Self {
        ScalarFn::Sine {
            amplitude,
            period,
            phase: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = match self {
            ScalarFn::Const(c) => c.is_finite(),
            ScalarFn::Linear { value, slope } => value.is_finite() && slope.is_finite(),
            ScalarFn::Sine {
                amplitude,
                period,
                phase,
            } => {
                if !(*period > 0.0) {
                    return Err(Error::InvalidFunction(format!(
                        "sine period must be positive, got {period}"
                    )));
                }
                amplitude.is_finite() && period.is_finite() && phase.is_finite()
            }
            ScalarFn::Tabulated(_) => true,
        };
        if finite {
            Ok(())
        } else {
            Err(Error::InvalidFunction("non-finite parameter".into()))
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        self.eval(s, 0)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        self.eval(s, 1)
    }

    /// `order`-th derivative at `s` (orders above 3 are zero for every variant but `Sine`).
    pub fn eval(&self, s: f64, order: u8) -> f64 {
        match self {
            ScalarFn::Const(c) => {
                if order == 0 {
                    *c
                } else {
                    0.0
                }
            }
            ScalarFn::Linear { value, slope } => match order {
                0 => value + slope * s,
                1 => *slope,
                _ => 0.0,
            },
            ScalarFn::Sine {
                amplitude,
                period,
                phase,
            } => {
                let k = TAU / period;
                let x = k * s + phase;
                let scale = amplitude * k.powi(order as i32);
                match order % 4 {
                    0 => scale * x.sin(),
                    1 => scale * x.cos(),
                    2 => -scale * x.sin(),
                    _ => -scale * x.cos(),
                }
            }
            ScalarFn::Tabulated(table) => table.eval(s, order),
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            ScalarFn::Const(c) => *c == 0.0,
            ScalarFn::Linear { value, slope } => *value == 0.0 && *slope == 0.0,
            ScalarFn::Sine { amplitude, .. } => *amplitude == 0.0,
            ScalarFn::Tabulated(t) => t.values.iter().all(|v| *v == 0.0),
        }
    }

    /// `c * self`.
    pub fn scaled(&self, c: f64) -> ScalarFn {
        match self {
            ScalarFn::Const(v) => ScalarFn::Const(c * v),
            ScalarFn::Linear { value, slope } => ScalarFn::Linear {
                value: c * value,
                slope: c * slope,
            },
            ScalarFn::Sine {
                amplitude,
                period,
                phase,
            } => ScalarFn::Sine {
                amplitude: c * amplitude,
                period: *period,
                phase: *phase,
            },
            ScalarFn::Tabulated(t) => ScalarFn::Tabulated(
                Pchip::new(t.knots.clone(), t.values.iter().map(|v| c * v).collect())
                    .expect("scaling keeps a valid table"),
            ),
        }
    }

    /// True when the `order`-th derivative is zero for every `s`.
    pub fn derivative_vanishes(&self, order: u8) -> bool {
        match self {
            ScalarFn::Const(_) if order >= 1 => true,
            ScalarFn::Linear { slope, .. } if order >= 1 => order >= 2 || *slope == 0.0,
            ScalarFn::Tabulated(_) if order >= 4 => true,
            _ => self.is_identically_zero(),
        }
    }

    /// Shortest length scale the function oscillates on, if it has one.
    pub fn wavelength(&self) -> Option<f64> {
        match self {
            ScalarFn::Sine {
                amplitude, period, ..
            } if *amplitude != 0.0 => Some(*period),
            _ => None,
        }
    }

    /// Largest |value| over `samples` uniform points of `[a, b]`.
    pub fn max_abs(&self, a: f64, b: f64, samples: usize, order: u8) -> f64 {
        sample_points(a, b, samples)
            .map(|s| self.eval(s, order).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn sample_points(a: f64, b: f64, samples: usize) -> impl Iterator<Item = f64> {
    let n = samples.max(2);
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

/// One term `coef * d^order f / ds^order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub func: ScalarFn,
    pub order: u8,
}

/// Weighted sum of scalar functions and their derivatives.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Combination {
    pub terms: Vec<Term>,
}

impl Combination {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::zero().plus(c, &ScalarFn::Const(1.0))
    }

    pub fn of(coef: f64, func: &ScalarFn) -> Self {
        Self::zero().plus(coef, func)
    }

    pub fn plus(self, coef: f64, func: &ScalarFn) -> Self {
        self.plus_derivative(coef, func, 0)
    }

    pub fn plus_derivative(mut self, coef: f64, func: &ScalarFn, order: u8) -> Self {
        if coef != 0.0 && !func.derivative_vanishes(order) {
            self.terms.push(Term {
                coef,
                func: func.clone(),
                order,
            });
        }
        self
    }

    pub fn add(mut self, other: &Combination) -> Self {
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    pub fn scale(mut self, c: f64) -> Self {
        if c == 0.0 {
            return Self::zero();
        }
        for t in &mut self.terms {
            t.coef *= c;
        }
        self
    }

    pub fn value(&self, s: f64) -> f64 {
        self.eval(s, 0)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        self.eval(s, 1)
    }

    pub fn eval(&self, s: f64, order: u8) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef * t.func.eval(s, t.order + order))
            .sum()
    }

    /// True when the combination vanishes for every `s` (no terms survive).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn wavelength(&self) -> Option<f64> {
        self.terms
            .iter()
            .filter_map(|t| t.func.wavelength())
            .reduce(f64::min)
    }
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
///
/// Outside the tabulated range the end values are held constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PchipTable", into = "PchipTable")]
pub struct Pchip {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PchipTable {
    s: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<PchipTable> for Pchip {
    type Error = Error;
    fn try_from(t: PchipTable) -> Result<Self> {
        Pchip::new(t.s, t.values)
    }
}

impl From<Pchip> for PchipTable {
    fn from(p: Pchip) -> Self {
        PchipTable {
            s: p.knots,
            values: p.values,
        }
    }
}

impl Pchip {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::InvalidFunction(format!(
                "table needs at least two knots and matching lengths (got {} knots, {} values)",
                knots.len(),
                values.len()
            )));
        }
        if knots.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction("table contains non-finite entries".into()));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidFunction(
                "table knots must be strictly increasing".into(),
            ));
        }
        let slopes = fritsch_carlson(&knots, &values);
        Ok(Pchip {
            knots,
            values,
            slopes,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    pub fn eval(&self, s: f64, order: u8) -> f64 {
        let (a, b) = self.domain();
        if s < a || s > b {
            let edge = if s < a { 0 } else { self.knots.len() - 1 };
            return if order == 0 { self.values[edge] } else { 0.0 };
        }
        let i = match self.knots.partition_point(|&k| k <= s) {
            0 => 0,
            p => (p - 1).min(self.knots.len() - 2),
        };
        let h = self.knots[i + 1] - self.knots[i];
        let t = (s - self.knots[i]) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        // Hermite basis derivatives with respect to t, then rescaled by h^-order.
        let (h00, h10, h01, h11) = match order {
            0 => (
                2.0 * t.powi(3) - 3.0 * t * t + 1.0,
                t.powi(3) - 2.0 * t * t + t,
                -2.0 * t.powi(3) + 3.0 * t * t,
                t.powi(3) - t * t,
            ),
            1 => (
                6.0 * t * t - 6.0 * t,
                3.0 * t * t - 4.0 * t + 1.0,
                -6.0 * t * t + 6.0 * t,
                3.0 * t * t - 2.0 * t,
            ),
            2 => (12.0 * t - 6.0, 6.0 * t - 4.0, -12.0 * t + 6.0, 6.0 * t - 2.0),
            3 => (12.0, 6.0, -12.0, 6.0),
            _ => return 0.0,
        };
        (h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1) / h.powi(order as i32)
    }
}

fn fritsch_carlson(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![d[0], d[0]];
    }
    let mut m = vec![0.0; n];
    for k in 1..n - 1 {
        if d[k - 1] * d[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    m[0] = end_slope(h[0], h[1], d[0], d[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    m
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m.signum() != d0.signum() || d0 == 0.0 {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sine_derivatives_cycle() {
        let f = ScalarFn::sine(2.0, 3.0);
        let k = TAU / 3.0;
        let s = 0.7;
        assert_abs_diff_eq!(f.eval(s, 1), 2.0 * k * (k * s).cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(f.eval(s, 2), -2.0 * k * k * (k * s).sin(), epsilon = 1e-13);
    }

    #[test]
    fn pchip_reproduces_linear_data() {
        let xs: Vec<f64> = (0..6).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        let p = Pchip::new(xs, ys).unwrap();
        for s in [0.1, 0.77, 2.3] {
            assert_abs_diff_eq!(p.eval(s, 0), 3.0 * s - 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(p.eval(s, 1), 3.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn pchip_keeps_monotone_data_monotone() {
        let p = Pchip::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let mut last = -1.0;
        for i in 0..=300 {
            let v = p.eval(i as f64 / 100.0, 0);
            assert!(v >= last - 1e-15);
            assert!((0.0..=1.0).contains(&v));
            last = v;
        }
    }

    #[test]
    fn pchip_rejects_unsorted_knots() {
        assert!(Pchip::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn combination_drops_zero_terms() {
        let c = Combination::of(0.0, &ScalarFn::Const(1.0)).plus(2.0, &ScalarFn::zero());
        assert!(c.is_zero());
        let w = Combination::of(1.0, &ScalarFn::sine(1.0, 4.0)).plus_derivative(
            1.0,
            &ScalarFn::Linear {
                value: 0.0,
                slope: 0.5,
            },
            1,
        );
        assert_abs_diff_eq!(w.value(1.0), 1.5, epsilon = 1e-15);
        assert_eq!(w.wavelength(), Some(4.0));
    }

    #[test]
    fn config_round_trip() {
        let f: ScalarFn = serde_json::from_str(r#"{"sine": {"amplitude": 1.0, "period": 15.0}}"#).unwrap();
        assert_eq!(f, ScalarFn::sine(1.0, 15.0));
        let t: ScalarFn =
            serde_json::from_str(r#"{"tabulated": {"s": [0, 1, 2], "values": [0, 1, 4]}}"#).unwrap();
        let back: ScalarFn = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(t, back);
        assert!(serde_json::from_str::<ScalarFn>(r#"{"tabulated": {"s": [1, 0], "values": [0, 1]}}"#).is_err());
    }
}
