use std::f64::consts::PI;

use num_complex::Complex64;

use super::wkb::{spinor_or_limit, Branch, WkbSample};
use crate::effective::EffectiveHamiltonian;
use crate::error::{Error, Result};
use crate::transverse::SquarePair;

/// ψ on a cell-centred `n × n` grid over the square cross section.
/// Arrays are row-major in (q₁ index, q₂ index).
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSectionField {
    pub s: f64,
    pub n: usize,
    pub side: f64,
    pub amplitude: Vec<f64>,
    /// wrapped to (−π, π]
    pub phase: Vec<f64>,
}

impl CrossSectionField {
    /// Cell-centre coordinate of index `i`.
    pub fn coordinate(&self, i: usize) -> f64 {
        cell_centre(self.side, self.n, i)
    }

    /// Midpoint-rule ∫|ψ|² over the cross section.
    pub fn norm(&self) -> f64 {
        let da = (self.side / self.n as f64).powi(2);
        self.amplitude.iter().map(|a| a * a).sum::<f64>() * da
    }
}

fn cell_centre(side: f64, n: usize, i: usize) -> f64 {
    -side / 2.0 + (i as f64 + 0.5) * side / n as f64
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        PI
    } else {
        y
    }
}

/// ψ = u₁|+⟩ + u₂|−⟩ for the pair on an `n × n` grid.
pub fn reconstruct_field(u: [f64; 2], pair: &SquarePair, n: usize, s: f64) -> CrossSectionField {
    let mut amplitude = Vec::with_capacity(n * n);
    let mut phase = Vec::with_capacity(n * n);
    for i1 in 0..n {
        let q1 = cell_centre(pair.side, n, i1);
        for i2 in 0..n {
            let q2 = cell_centre(pair.side, n, i2);
            let (plus, minus) = pair.states(q1, q2);
            let psi: Complex64 = plus * u[0] + minus * u[1];
            amplitude.push(psi.norm());
            phase.push(wrap(psi.arg()));
        }
    }
    CrossSectionField {
        s,
        n,
        side: pair.side,
        amplitude,
        phase,
    }
}

/// Phase change between two consecutive snapshots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseJump {
    pub s_before: f64,
    pub s_after: f64,
    /// grid median of |Δphase|
    pub raw: f64,
    /// same, after removing the mean of the neighbouring intervals' changes
    pub corrected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseScan {
    pub branch: Branch,
    pub spinors: Vec<WkbSample>,
    pub fields: Vec<CrossSectionField>,
    pub jumps: Vec<PhaseJump>,
}

impl PhaseScan {
    /// Interval with the largest drift-corrected jump.
    pub fn largest_jump(&self) -> Option<PhaseJump> {
        self.jumps.iter().copied().max_by(|a, b| a.corrected.total_cmp(&b.corrected))
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Follows ψ_branch along `s_samples` using the WKB spinor and reports the
/// phase change between consecutive snapshots. Points where either field is
/// below 5% of its peak amplitude are ignored.
pub fn phase_evolution_scan(
    h: &EffectiveHamiltonian,
    e: f64,
    branch: Branch,
    s_samples: &[f64],
    n: usize,
) -> Result<PhaseScan> {
    let pair = h
        .pair()
        .ok_or_else(|| Error::Unsupported("field scan needs a square degenerate pair".into()))?;
    let span = match (s_samples.first(), s_samples.last()) {
        (Some(a), Some(b)) if b > a => b - a,
        _ => 1.0,
    };
    let spinors = s_samples
        .iter()
        .map(|&s| spinor_or_limit(s, branch, h, e, span))
        .collect::<Result<Vec<_>>>()?;
    let fields: Vec<CrossSectionField> = spinors
        .iter()
        .map(|w| reconstruct_field(w.u, &pair, n, w.s))
        .collect();

    let steps = fields.len().saturating_sub(1);
    let masks: Vec<Vec<bool>> = (0..steps)
        .map(|k| {
            let (a, b) = (&fields[k], &fields[k + 1]);
            let amax = a.amplitude.iter().fold(0.0f64, |m, x| m.max(*x));
            let bmax = b.amplitude.iter().fold(0.0f64, |m, x| m.max(*x));
            a.amplitude
                .iter()
                .zip(&b.amplitude)
                .map(|(x, y)| *x >= 0.05 * amax && *y >= 0.05 * bmax)
                .collect()
        })
        .collect();
    let deltas: Vec<Vec<f64>> = (0..steps)
        .map(|k| {
            fields[k]
                .phase
                .iter()
                .zip(&fields[k + 1].phase)
                .map(|(x, y)| wrap(y - x))
                .collect()
        })
        .collect();
    let jumps = (0..steps)
        .map(|k| {
            let mask = &masks[k];
            let raw = median(
                deltas[k]
                    .iter()
                    .zip(mask)
                    .filter(|(_, m)| **m)
                    .map(|(d, _)| d.abs())
                    .collect(),
            );
            let neighbours: Vec<&Vec<f64>> = [k.checked_sub(1), (k + 1 < steps).then_some(k + 1)]
                .into_iter()
                .flatten()
                .map(|j| &deltas[j])
                .collect();
            let corrected = if neighbours.is_empty() {
                raw
            } else {
                median(
                    (0..deltas[k].len())
                        .filter(|&i| mask[i])
                        .map(|i| {
                            let drift = neighbours.iter().map(|d| d[i]).sum::<f64>() / neighbours.len() as f64;
                            wrap(deltas[k][i] - drift).abs()
                        })
                        .collect(),
                )
            };
            PhaseJump {
                s_before: fields[k].s,
                s_after: fields[k + 1].s,
                raw,
                corrected,
            }
        })
        .collect();
    Ok(PhaseScan {
        branch,
        spinors,
        fields,
        jumps,
    })
}

/// Pearson correlation between `b` and `a` rotated by +π/2 in the cross
/// section (b[i₁][i₂] against a[i₂][n−1−i₁]).
pub fn rotation_correlation(a: &[f64], b: &[f64], n: usize) -> f64 {
    let rotated: Vec<f64> = (0..n * n).map(|k| a[(k % n) * n + (n - 1 - k / n)]).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ma, mb) = (mean(&rotated), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in rotated.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}
