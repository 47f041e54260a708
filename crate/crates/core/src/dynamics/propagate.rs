use num_complex::Complex64;

use super::TwoLevelField;
use crate::effective::EffectiveHamiltonian;
use crate::error::{Error, Result};

/// Local error tolerance (relative and absolute) of the adaptive stepper.
pub const TOLERANCE: f64 = 1e-10;

type State = [Complex64; 4];

#[derive(Debug, Clone)]
pub struct Propagation {
    pub field: TwoLevelField,
    pub derivative: Vec<[Complex64; 2]>,
    /// Conserved current at each sample.
    pub flux: Vec<f64>,
    pub steps: usize,
}

/// J = Im(φ†φ′) − α φ†σ_zφ.
pub fn flux(h: &EffectiveHamiltonian, s: f64, phi: &[Complex64; 2], dphi: &[Complex64; 2]) -> f64 {
    let sig = sigma(h);
    let a = h.alpha(s);
    (0..2)
        .map(|c| (phi[c].conj() * dphi[c]).im - a * sig[c] * phi[c].norm_sqr())
        .sum()
}

fn sigma(h: &EffectiveHamiltonian) -> [f64; 2] {
    if h.dim == 2 {
        [1.0, -1.0]
    } else {
        // both slots carry the same scalar equation
        [1.0, 1.0]
    }
}

fn rhs(h: &EffectiveHamiltonian, e: f64, s: f64, y: &State) -> State {
    let sig = sigma(h);
    let a = h.alpha(s);
    let da = h.alpha_derivative(s);
    let v = h.vmat(s);
    let vg = h.vg(s);
    let i = Complex64::i();
    let mut out = [y[2], y[3], Complex64::default(), Complex64::default()];
    for c in 0..2 {
        let mut pot = (vg - e) * y[c];
        for d in 0..2 {
            if h.dim == 2 || c == d {
                pot += v[(c, d)] * y[d];
            }
        }
        out[2 + c] = i * sig[c] * (da * y[c] + 2.0 * a * y[2 + c]) + a * a * y[c] + 2.0 * pot;
    }
    out
}

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..4 {
            out[i] += k[i] * (c * h);
        }
    }
    out
}

/// One Dormand–Prince step; returns the 5th-order solution and the error estimate.
fn dopri_step(f: &impl Fn(f64, &State) -> State, s: f64, y: &State, k1: &State, h: f64) -> (State, State, State) {
    let k2 = f(s + h / 5.0, &axpy(y, &[(1.0 / 5.0, k1)], h));
    let k3 = f(s + 3.0 * h / 10.0, &axpy(y, &[(3.0 / 40.0, k1), (9.0 / 40.0, &k2)], h));
    let k4 = f(
        s + 4.0 * h / 5.0,
        &axpy(y, &[(44.0 / 45.0, k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)], h),
    );
    let k5 = f(
        s + 8.0 * h / 9.0,
        &axpy(
            y,
            &[
                (19372.0 / 6561.0, k1),
                (-25360.0 / 2187.0, &k2),
                (64448.0 / 6561.0, &k3),
                (-212.0 / 729.0, &k4),
            ],
            h,
        ),
    );
    let k6 = f(
        s + h,
        &axpy(
            y,
            &[
                (9017.0 / 3168.0, k1),
                (-355.0 / 33.0, &k2),
                (46732.0 / 5247.0, &k3),
                (49.0 / 176.0, &k4),
                (-5103.0 / 18656.0, &k5),
            ],
            h,
        ),
    );
    let y5 = axpy(
        y,
        &[
            (35.0 / 384.0, k1),
            (500.0 / 1113.0, &k3),
            (125.0 / 192.0, &k4),
            (-2187.0 / 6784.0, &k5),
            (11.0 / 84.0, &k6),
        ],
        h,
    );
    let k7 = f(s + h, &y5);
    let e = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let ks = [k1, &k2, &k3, &k4, &k5, &k6, &k7];
    let mut err = [Complex64::default(); 4];
    for (c, k) in e.iter().zip(ks) {
        for i in 0..4 {
            err[i] += k[i] * (c * h);
        }
    }
    (y5, err, k7)
}

/// Integrates −½(∂_s − iασ_z)²φ + (V_g + V)φ = Eφ from `range.0` with
/// φ = `phi0`, φ′ = `dphi0`, recording `samples` equally spaced points
/// (endpoints included).
pub fn propagate(
    h: &EffectiveHamiltonian,
    e: f64,
    phi0: [Complex64; 2],
    dphi0: [Complex64; 2],
    range: (f64, f64),
    samples: usize,
) -> Result<Propagation> {
    let (a, b) = range;
    if !e.is_finite() || phi0.iter().chain(&dphi0).any(|z| !z.norm().is_finite()) {
        return Err(Error::InvalidInput("energy and initial data must be finite".into()));
    }
    if !(b > a) || samples < 2 {
        return Err(Error::InvalidInput(format!(
            "need b > a and at least 2 samples, got [{a}, {b}] with {samples}"
        )));
    }
    let f = |s: f64, y: &State| rhs(h, e, s, y);
    let targets: Vec<f64> = (0..samples)
        .map(|k| a + (b - a) * k as f64 / (samples - 1) as f64)
        .collect();
    let mut y: State = [phi0[0], phi0[1], dphi0[0], dphi0[1]];
    let mut s = a;
    let mut step = ((b - a) / samples as f64).min(0.01);
    let mut k1 = f(s, &y);
    let mut values = vec![[y[0], y[1]]];
    let mut derivative = vec![[y[2], y[3]]];
    let mut steps = 0;
    for &target in &targets[1..] {
        while s < target {
            let last = target - s <= step;
            let trial = if last { target - s } else { step };
            if trial < 1e-13 * (b - a) {
                return Err(Error::Integration {
                    s,
                    reason: format!("step size underflow ({trial:e})"),
                });
            }
            let (y_new, err, k_new) = dopri_step(&f, s, &y, &k1, trial);
            let ratio = (0..4)
                .map(|i| err[i].norm() / (TOLERANCE * (1.0 + y[i].norm().max(y_new[i].norm()))))
                .fold(0.0, f64::max);
            if !ratio.is_finite() {
                return Err(Error::Integration {
                    s,
                    reason: "non-finite solution".into(),
                });
            }
            let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            if ratio <= 1.0 {
                s = if last { target } else { s + trial };
                y = y_new;
                k1 = k_new;
                steps += 1;
                if !last {
                    step = trial * factor;
                }
            } else {
                step = trial * factor;
            }
        }
        values.push([y[0], y[1]]);
        derivative.push([y[2], y[3]]);
    }
    let dx = (b - a) / (samples - 1) as f64;
    let mut weights = vec![dx; samples];
    weights[0] *= 0.5;
    weights[samples - 1] *= 0.5;
    let flux = targets
        .iter()
        .zip(values.iter().zip(&derivative))
        .map(|(&s, (p, d))| flux(h, s, p, d))
        .collect();
    Ok(Propagation {
        field: TwoLevelField {
            s: targets,
            values,
            weights,
        },
        derivative,
        flux,
        steps,
    })
}
