//! Browser bindings: cross-section snapshots of the + branch, quantum
//! geometric tensor maps and the level splitting near E.
//!
//! Every entry point works on the example tube (helix radius = rise = 25,
//! unit square, pair (1, 2), length 15) with the squeeze strength δ and the
//! rotation rate ω as knobs.

use twisted_tube::cli::{ProfileConfig, RunConfig};
use twisted_tube::dynamics::{discretize, measured_splitting, phase_evolution_scan, predicted_splitting, Branch, Grid1D};
use twisted_tube::qgt::{qgt_analytic, PhiDotField, QgtModel};
use twisted_tube::scalar::ScalarFn;
use wasm_bindgen::prelude::*;

fn tube(delta: f64, rate: f64) -> RunConfig {
    let mut cfg = RunConfig::example();
    cfg.profile = ProfileConfig::Combined {
        delta,
        theta: ScalarFn::Linear { value: 0.0, slope: rate },
        f: ScalarFn::sine(1.0, cfg.grid.length),
    };
    cfg
}

fn err(e: twisted_tube::Error) -> String {
    e.to_string()
}

/// `[amplitude.., phase..]`, each n² values in row-major (q1, q2) order.
pub fn field_values(delta: f64, rate: f64, s: f64, n: usize) -> Result<Vec<f64>, String> {
    let cfg = tube(delta, rate);
    cfg.validate().map_err(err)?;
    let h = cfg.hamiltonian().map_err(err)?;
    let e = cfg.energy(&h).map_err(err)?;
    let scan = phase_evolution_scan(&h, e, Branch::Plus, &[s], n.clamp(4, 256)).map_err(err)?;
    let f = &scan.fields[0];
    Ok(f.amplitude.iter().chain(&f.phase).copied().collect())
}

/// One QGT component over an m × m (ω, f) grid, ω along rows.
/// `which`: 0 g_ωω, 1 g_ωf, 2 g_ff, 3 F_ωf, 4 mixing angle φ.
/// Points where the mixing angle is undefined come back as NaN.
pub fn qgt_values(
    delta: f64,
    rate: f64,
    which: u32,
    omega: [f64; 2],
    f: [f64; 2],
    m: usize,
) -> Result<Vec<f64>, String> {
    let cfg = tube(delta, rate);
    cfg.validate().map_err(err)?;
    let h = cfg.hamiltonian().map_err(err)?;
    let p = (2.0 * cfg.energy(&h).map_err(err)?).sqrt();
    let model = QgtModel::new(cfg.pair().map_err(err)?, cfg.curve.torsion().value(0.0));
    let (theta, fs) = cfg.profile.combined_parts().expect("combined profile");
    let field = PhiDotField::from_profiles(model, p, theta, fs, cfg.grid.length);
    let m = m.clamp(2, 200);
    let at = |k: usize, r: [f64; 2]| r[0] + (r[1] - r[0]) * k as f64 / (m - 1) as f64;
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let (w, ff) = (at(i, omega), at(j, f));
            let value = field.eval(w, ff).and_then(|pd| qgt_analytic(&model, w, ff, p, pd)).map(|q| match which {
                0 => q.metric[(0, 0)],
                1 => q.metric[(0, 1)],
                2 => q.metric[(1, 1)],
                3 => q.curvature[(0, 1)],
                _ => q.phi,
            });
            out.push(value.unwrap_or(f64::NAN));
        }
    }
    Ok(out)
}

/// `[E, predicted, measured, level_1..level_4]` for the + branch doublets
/// near the automatic energy on a periodic grid of `points`.
pub fn splitting_values(delta: f64, rate: f64, points: usize) -> Result<Vec<f64>, String> {
    let mut cfg = tube(delta, rate);
    cfg.grid.points = points;
    cfg.validate().map_err(err)?;
    let h = cfg.hamiltonian().map_err(err)?;
    let e = cfg.energy(&h).map_err(err)?;
    let grid = Grid1D::new(cfg.grid.length, points, cfg.grid.bc).map_err(err)?;
    let op = discretize(&h, &grid).map_err(err)?;
    let measured = measured_splitting(&op, e, 24).map_err(err)?;
    let predicted = predicted_splitting(&h, e, cfg.grid.length, 512).map_err(err)?;
    let mut out = vec![e, predicted, measured.splitting];
    out.extend(measured.levels);
    Ok(out)
}

#[wasm_bindgen]
pub fn field(delta: f64, rate: f64, s: f64, n: usize) -> Result<Vec<f64>, JsError> {
    field_values(delta, rate, s, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn qgt_map(
    delta: f64,
    rate: f64,
    which: u32,
    omega_min: f64,
    omega_max: f64,
    f_min: f64,
    f_max: f64,
    m: usize,
) -> Result<Vec<f64>, JsError> {
    qgt_values(delta, rate, which, [omega_min, omega_max], [f_min, f_max], m).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn splitting(delta: f64, rate: f64, points: usize) -> Result<Vec<f64>, JsError> {
    splitting_values(delta, rate, points).map_err(|e| JsError::new(&e))
}
