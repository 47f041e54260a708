use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Vector2};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use super::config::RunConfig;
use super::table::{emit_json, emit_table, Cell, ResultTable};
use crate::dynamics::{
    discretize, measured_splitting, phase_evolution_scan, predicted_splitting, propagate, rotation_correlation,
    spinor_or_limit, wkb_branch, wkb_diagnostics, Boundary, Branch, Grid1D,
};
use crate::effective::{vt_diagnostic, EffectiveHamiltonian};
use crate::error::{Error, Result};
use crate::geometry::{gauge_divergence, gauge_divergence_by_differences, metric_by_differences, metric_tensor};
use crate::qgt::{berry_loop, phi_dot_path, qgt_analytic, qgt_fd_oracle, PhiDotField, QgtModel};
use crate::transverse::{angular_expectation, angular_expectation_quadrature, bessel_zero, box_energy, CrossSection};

/// Levels requested around E when measuring the splitting.
const SPLITTING_LEVELS: usize = 24;
/// Samples used by `geometry-check`.
pub const GEOMETRY_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Modes,
    GeometryCheck,
    Effective,
    Spectrum,
    Propagate,
    Wkb,
    FieldScan,
    Qgt,
    BerryLoop,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Modes,
        Command::GeometryCheck,
        Command::Effective,
        Command::Spectrum,
        Command::Propagate,
        Command::Wkb,
        Command::FieldScan,
        Command::Qgt,
        Command::BerryLoop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Modes => "modes",
            Command::GeometryCheck => "geometry-check",
            Command::Effective => "effective",
            Command::Spectrum => "spectrum",
            Command::Propagate => "propagate",
            Command::Wkb => "wkb",
            Command::FieldScan => "field-scan",
            Command::Qgt => "qgt",
            Command::BerryLoop => "berry-loop",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown subcommand {s:?}")))
    }
}

/// What a subcommand produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: Command,
    /// one-line human summary
    pub line: String,
    pub summary: Map<String, Value>,
    pub files: Vec<PathBuf>,
    /// false when a check subcommand found a violation (files are still written)
    pub passed: bool,
}

struct Out<'a> {
    cfg: &'a RunConfig,
    files: Vec<PathBuf>,
}

impl Out<'_> {
    fn table(&mut self, stem: &str, table: &ResultTable) -> Result<()> {
        let format = self.cfg.outputs.format;
        let path = self.cfg.outputs.dir.join(format!("{stem}.{}", format.extension()));
        emit_table(table, &path, format)?;
        self.files.push(path);
        Ok(())
    }
}

/// Runs `cmd`, writes its tables and `summary.json` into the output directory.
pub fn run(cmd: Command, cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let dir = &cfg.outputs.dir;
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut out = Out { cfg, files: Vec::new() };
    let mut summary = Map::new();
    let (line, passed) = match cmd {
        Command::Modes => (modes(&mut out, &mut summary)?, true),
        Command::GeometryCheck => geometry(&mut out, &mut summary)?,
        Command::Effective => (effective(&mut out, &mut summary)?, true),
        Command::Spectrum => (spectrum(&mut out, &mut summary)?, true),
        Command::Propagate => (propagation(&mut out, &mut summary)?, true),
        Command::Wkb => (wkb(&mut out, &mut summary)?, true),
        Command::FieldScan => (field_scan(&mut out, &mut summary)?, true),
        Command::Qgt => (qgt(&mut out, &mut summary)?, true),
        Command::BerryLoop => (berry(&mut out, &mut summary)?, true),
    };
    summary.insert("command".into(), json!(cmd.name()));
    summary.insert("passed".into(), json!(passed));
    let names: Vec<String> = out
        .files
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    summary.insert("files".into(), json!(names));
    let path = dir.join("summary.json");
    emit_json(&Value::Object(summary.clone()), &path)?;
    out.files.push(path);
    Ok(RunReport {
        command: cmd,
        line,
        summary,
        files: out.files,
        passed,
    })
}

fn put(summary: &mut Map<String, Value>, key: &str, value: impl Into<Value>) {
    summary.insert(key.to_string(), value.into());
}

fn modes(out: &mut Out, summary: &mut Map<String, Value>) -> Result<String> {
    let cfg = out.cfg;
    let mode = cfg.mode()?;
    match cfg.cross {
        CrossSection::Square { side } => {
            let mut t = ResultTable::new(&[
                ("n1", "1"),
                ("n2", "1"),
                ("e1", "hbar^2/(m a0^2)"),
                ("e2", "hbar^2/(m a0^2)"),
                ("l_exp", "hbar"),
                ("l_exp_quadrature", "hbar"),
            ]);
            let top = cfg.modes.n1.max(cfg.modes.n2).max(5);
            for n1 in 1..=top {
                for n2 in n1 + 1..=top {
                    t.push(vec![
                        Cell::Int(n1 as i64),
                        Cell::Int(n2 as i64),
                        box_energy(n1, side).into(),
                        box_energy(n2, side).into(),
                        angular_expectation(n1, n2).into(),
                        angular_expectation_quadrature(n1, n2, 256).into(),
                    ]);
                }
            }
            out.table("modes", &t)?;
        }
        CrossSection::Circular { radius } => {
            let mut t = ResultTable::new(&[("n", "1"), ("l", "1"), ("bessel_zero", "1"), ("energy", "hbar^2/(m a0^2)")]);
            for n in 1..=3u32 {
                for l in 0..=3i32 {
                    let j = bessel_zero(l, n)?;
                    t.push(vec![
                        Cell::Int(n as i64),
                        Cell::Int(l as i64),
                        j.into(),
                        (j * j / (2.0 * radius * radius)).into(),
                    ]);
                }
            }
            out.table("modes", &t)?;
        }
    }
    put(summary, "mode_energy", mode.energy());
    put(summary, "l_exp", mode.l_exp());
    Ok(format!(
        "modes: transverse energy {:.6}, <L> = {:.6}",
        mode.energy(),
        mode.l_exp()
    ))
}

/// k-th point of the base-b van der Corput sequence.
fn radical_inverse(mut k: usize, base: usize) -> f64 {
    let (mut x, mut scale) = (0.0, 1.0 / base as f64);
    while k > 0 {
        x += (k % base) as f64 * scale;
        k /= base;
        scale /= base as f64;
    }
    x
}

/// Deterministic (s, q) samples spread over [0, length] × cross section.
pub fn geometry_samples(cross: &CrossSection, length: f64, count: usize) -> Vec<(f64, Vector2<f64>)> {
    (1..=count)
        .map(|k| {
            let (u, v, w) = (radical_inverse(k, 2), radical_inverse(k, 3), radical_inverse(k, 5));
            let q = match *cross {
                CrossSection::Square { side } => Vector2::new((v - 0.5) * side, (w - 0.5) * side),
                CrossSection::Circular { radius } => {
                    let (r, phi) = (radius * v.sqrt(), std::f64::consts::TAU * w);
                    Vector2::new(r * phi.cos(), r * phi.sin())
                }
            };
            (u * length, q)
        })
        .collect()
}

/// Closed-form metric against finite differences of the embedding at
/// deterministic samples. Returns the table and whether every row passed.
pub fn geometry_check(cfg: &RunConfig, count: usize) -> Result<(ResultTable, bool)> {
    let profile = cfg.transform();
    let mut t = ResultTable::new(&[
        ("sample", "1"),
        ("s", "a0"),
        ("q1", "a0"),
        ("q2", "a0"),
        ("metric_rel_err", "1"),
        ("det_rel_err", "1"),
        ("inverse_err", "1"),
        ("divergence_err", "1/a0"),
        ("status", "1"),
    ]);
    let mut all = true;
    for (k, (s, q)) in geometry_samples(&cfg.cross, cfg.grid.length, count).into_iter().enumerate() {
        let m = metric_tensor(&cfg.curve, &profile, s, q)?;
        let fd = metric_by_differences(&cfg.curve, &profile, s, q, 1e-3)?;
        let metric_err = (m.g - fd).amax() / m.g.amax();
        let det_err = (m.g.determinant() - m.det_g).abs() / m.det_g.abs();
        let inv_err = (m.g * m.g_inv - Matrix3::identity()).amax();
        let div_fd = gauge_divergence_by_differences(&cfg.curve, &profile, s, q, 1e-4)?;
        let div_err = (gauge_divergence(&profile, s) - div_fd).abs();
        let ok = metric_err < 1e-6 && det_err < 1e-10 && inv_err < 1e-8 && div_err < 1e-6;
        all &= ok;
        t.push(vec![
            k.into(),
            s.into(),
            q.x.into(),
            q.y.into(),
            metric_err.into(),
            det_err.into(),
            inv_err.into(),
            div_err.into(),
            ok.into(),
        ]);
    }
    Ok((t, all))
}

fn geometry(out: &mut Out, summary: &mut Map<String, Value>) -> Result<(String, bool)> {
    let (t, ok) = geometry_check(out.cfg, GEOMETRY_SAMPLES)?;
    out.table("geometry_check", &t)?;
    let worst = |col: usize| {
        t.rows
            .iter()
            .map(|r| match r[col] {
                Cell::Float(x) => x,
                _ => 0.0,
            })
            .fold(0.0, f64::max)
    };
    let (me, de, ie) = (worst(4), worst(5), worst(6));
    put(summary, "samples", t.rows.len());
    put(summary, "max_metric_rel_err", me);
    put(summary, "max_det_rel_err", de);
    put(summary, "max_inverse_err", ie);
    put(summary, "max_divergence_err", worst(7));
    let verdict = if ok { "pass" } else { "FAIL" };
    Ok((
        format!(
            "geometry-check: {verdict} on {} samples (metric {me:.1e}, det {de:.1e}, inverse {ie:.1e})",
            t.rows.len()
        ),
        ok,
    ))
}

fn effective(out: &mut Out, summary: &mut Map<String, Value>) -> Result<String> {
    let cfg = out.cfg;
    let h = cfg.hamiltonian()?;
    let n = cfg.wkb.samples;
    let mut t = ResultTable::new(&[
        ("s", "a0"),
        ("alpha", "1/a0"),
        ("alpha_prime", "1/a0^2"),
        ("v_geometric", "hbar^2/(m a0^2)"),
        ("v_identity", "hbar^2/(m a0^2)"),
        ("v_x", "hbar^2/(m a0^2)"),
        ("v_y", "hbar^2/(m a0^2)"),
        ("v_z", "hbar^2/(m a0^2)"),
    ]);
    for k in 0..=n {
        let s = cfg.grid.length * k as f64 / n as f64;
        let [c0, cx, cy, cz] = h.potential.components(s);
        t.push(vec![
            s.into(),
            h.alpha(s).into(),
            h.alpha_derivative(s).into(),
            h.vg(s).into(),
            c0.into(),
            cx.into(),
            cy.into(),
            cz.into(),
        ]);
    }
    out.table("effective", &t)?;
    let report = vt_diagnostic(&cfg.curve, &cfg.transform(), &cfg.cross, cfg.grid.length, 16)?;
    put(summary, "case", format!("{:?}", h.meta.case));
    put(summary, "dim", h.dim);
    put(summary, "vt_estimate", report.vt_estimate);
    put(summary, "slow_variation_ratio", report.slow_var_ratio);
    Ok(format!(
        "effective: {:?}, {} level(s), alpha(0) = {:.6}, |V_T| <= {:.3e}",
        h.meta.case,
        h.dim,
        h.alpha(0.0),
        report.vt_estimate
    ))
}

fn grid(cfg: &RunConfig) -> Result<Grid1D> {
    Grid1D::new(cfg.grid.length, cfg.grid.points, cfg.grid.bc)
}

fn spectrum(out: &mut Out, summary: &mut Map<String, Value>) -> Result<String> {
    let cfg = out.cfg;
    let h = cfg.hamiltonian()?;
    let op = discretize(&h, &grid(cfg)?)?;
    let mut values = op.eigenvalues()?;
    values.sort_by(f64::total_cmp);
    let mut t = ResultTable::new(&[("index", "1"), ("energy", "hbar^2/(m a0^2)")]);
    for (k, e) in values.iter().take(20).enumerate() {
        t.push(vec![k.into(), (*e).into()]);
    }
    out.table("spectrum", &t)?;
    put(summary, "lowest", values[0]);
    let mut line = format!("spectrum: lowest level {:.10}", values[0]);
    if h.dim == 2 && cfg.grid.bc == Boundary::Periodic {
        let e = cfg.energy(&h)?;
        let predicted = predicted_splitting(&h, e, cfg.grid.length, cfg.wkb.samples)?;
        let measured = measured_splitting(&op, e, SPLITTING_LEVELS)?;
        let rel = (predicted - measured.splitting).abs() / measured.splitting;
        let mut s = ResultTable::new(&[
            ("energy", "hbar^2/(m a0^2)"),
            ("harmonic", "1"),
            ("level_1", "hbar^2/(m a0^2)"),
            ("level_2", "hbar^2/(m a0^2)"),
            ("level_3", "hbar^2/(m a0^2)"),
            ("level_4", "hbar^2/(m a0^2)"),
            ("measured", "hbar^2/(m a0^2)"),
            ("predicted", "hbar^2/(m a0^2)"),
            ("relative_difference", "1"),
        ]);
        let [l1, l2, l3, l4] = measured.levels;
        s.push(vec![
            e.into(),
            Cell::Int(measured.harmonic),
            l1.into(),
            l2.into(),
            l3.into(),
            l4.into(),
            measured.splitting.into(),
            predicted.into(),
            rel.into(),
        ]);
        out.table("splitting", &s)?;
        put(summary, "energy", e);
        put(summary, "harmonic", measured.harmonic);
        put(summary, "splitting_measured", measured.splitting);
        put(summary, "splitting_predicted", predicted);
        put(summary, "splitting_relative_difference", rel);
        line.push_str(&format!(
            "; p+/p- splitting near E = {e:.4}: measured {:.6}, predicted {predicted:.6} ({:.2}%)",
            measured.splitting,
            100.0 * rel
        ));
    }
    Ok(line)
}

fn propagation(out: &mut Out, summary: &mut Map<String, Value>) -> Result<String> {
    let cfg = out.cfg;
    let h = cfg.hamiltonian()?;
    let e = cfg.energy(&h)?;
    let length = cfg.grid.length;
    let i = Complex64::i();
    let (phi0, dphi0) = if h.dim == 2 {
        let w = spinor_or_limit(0.0, Branch::Plus, &h, e, length)?;
        let u = [Complex64::new(w.u[0], 0.0), Complex64::new(w.u[1], 0.0)];
        (u, [i * w.p * u[0], i * w.p * u[1]])
    } else {
        let p = (2.0 * (e - h.vg(0.0) - h.potential.identity.value(0.0))).max(0.0).sqrt() + h.alpha(0.0);
        ([Complex64::new(1.0, 0.0), Complex64::default()], [i * p, Complex64::default()])
    };
    let run = propagate(&h, e, phi0, dphi0, (0.0, length), cfg.wkb.samples + 1)?;
    let mut t = ResultTable::new(&[
        ("s", "a0"),
        ("re_phi_plus", "a0^-1/2"),
        ("im_phi_plus", "a0^-1/2"),
        ("re_phi_minus", "a0^-1/2"),
        ("im_phi_minus", "a0^-1/2"),
        ("density", "1/a0"),
        ("flux", "hbar/(m a0)"),
    ]);
    for ((s, v), j) in run.field.s.iter().zip(&run.field.values).zip(&run.flux) {
        t.push(vec![
            (*s).into(),
            v[0].re.into(),
            v[0].im.into(),
            v[1].re.into(),
            v[1].im.into(),
            (v[0].norm_sqr() + v[1].norm_sqr()).into(),
            (*j).into(),
        ]);
    }
    out.table("propagate", &t)?;
    let j0 = run.flux[0];
    let drift = run.flux.iter().map(|j| (j - j0).abs()).fold(0.0, f64::max) / j0.abs();
    put(summary, "energy", e);
    put(summary, "flux", j0);
    put(summary, "flux_relative_drift", drift);
    put(summary, "steps", run.steps);
    Ok(format!(
        "propagate: E = {e:.4}, flux {j0:.6} with relative drift {drift:.2e} over {} steps",
        run.steps
    ))
}

fn two_level(h: &EffectiveHamiltonian, what: &str) -> Result<()> {
    if h.dim == 2 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("{what} needs a square cross section with a degenerate pair")))
    }
}

fn wkb(out: &mut Out, summary: &mut Map<String, Value>) -> Result<String> {
    let cfg = out.cfg;
    let h = cfg.hamiltonian()?;
    two_level(&h, "wkb")?;
    let e = cfg.energy(&h)?;
    let mut t = ResultTable::new(&[
        ("branch", "1"),
        ("s", "a0"),
        ("p", "hbar/a0"),
        ("b", "hbar^2/(m a0^2)"),
        ("g", "hbar^2/(m a0^2)"),
        ("lambda", "hbar^2/(m a0^2)"),
        ("u_plus", "1"),
        ("u_minus", "1"),
        ("speed", "hbar/(m a0)"),
        ("phase", "rad"),
        ("amplitude", "a0^-1/2"),
    ]);
    for branch in [Branch::Plus, Branch::Minus] {
        let b = wkb_branch(&h, e, branch, cfg.grid.length, cfg.wkb.samples)?;
        let name = if branch == Branch::Plus { "plus" } else { "minus" };
        for ((w, ph), amp) in b.samples.iter().zip(&b.phase).zip(&b.amplitude) {
            t.push(vec![
                name.into(),
                w.s.into(),
                w.p.into(),
                w.b.into(),
                w.g.into(),
                w.lambda.into(),
                w.u[0].into(),
                w.u[1].into(),
                w.speed.into(),
                (*ph).into(),
                (*amp).into(),
            ]);
        }
    }
    out.table("wkb", &t)?;
    let d = wkb_diagnostics(&h, e, cfg.grid.length, cfg.wkb.samples)?;
    put(summary, "energy", e);
    put(summary, "branch_coupling", d.branch_coupling);
    put(summary, "max_alpha_derivative", d.max_alpha_derivative);
    put(summary, "energy_ratio", d.energy_ratio);
    Ok(format!(
        "wkb: E = {e:.4}, branch coupling {:.3e}, E/max(|g|, alpha^2/2) = {:.1}",
        d.branch_coupling, d.energy_ratio
    ))
}

fn nearest_index(s: &[f64], target: f64) -> usize {
    (0..s.len())
        .min_by(|&a, &b| (s[a] - target).abs().total_cmp(&(s[b] - target).abs()))
        .unwrap_or(0)
}

fn field_scan(out: &mut Out, summary: &mut Map<String, Value>) -> Result<String> {
    let cfg = out.cfg;
    let h = cfg.hamiltonian()?;
    two_level(&h, "field-scan")?;
    let e = cfg.energy(&h)?;
    let (length, count, n) = (cfg.grid.length, cfg.grid.field_samples, cfg.grid.field_points);
    let s: Vec<f64> = (0..count).map(|k| length * k as f64 / count as f64).collect();
    let scan = phase_evolution_scan(&h, e, Branch::Plus, &s, n)?;
    for (k, f) in scan.fields.iter().enumerate() {
        let mut t = ResultTable::new(&[("q1", "a0"), ("q2", "a0"), ("amplitude", "1/a0"), ("phase", "rad")]);
        for i1 in 0..n {
            for i2 in 0..n {
                let idx = i1 * n + i2;
                t.push(vec![
                    f.coordinate(i1).into(),
                    f.coordinate(i2).into(),
                    f.amplitude[idx].into(),
                    f.phase[idx].into(),
                ]);
            }
        }
        out.table(&format!("field_s{k}"), &t)?;
    }
    let mut t = ResultTable::new(&[("s_before", "a0"), ("s_after", "a0"), ("raw", "rad"), ("corrected", "rad")]);
    for j in &scan.jumps {
        t.push(vec![j.s_before.into(), j.s_after.into(), j.raw.into(), j.corrected.into()]);
    }
    out.table("field_jumps", &t)?;

    let (qa, qb) = (nearest_index(&s, 0.25 * length), nearest_index(&s, 0.75 * length));
    let corr = rotation_correlation(&scan.fields[qa].amplitude, &scan.fields[qb].amplitude, n);
    put(summary, "energy", e);
    put(summary, "rotation_correlation", corr);
    let mut line = format!("field-scan: {count} snapshots");
    if let Some(j) = scan.largest_jump() {
        put(summary, "jump", j.corrected);
        put(summary, "jump_raw", j.raw);
        put(summary, "jump_bracket", json!([j.s_before, j.s_after]));
        line.push_str(&format!(
            ", phase jump {:.4} rad between s = {:.4} and {:.4}",
            j.corrected, j.s_before, j.s_after
        ));
    }
    line.push_str(&format!(
        ", amplitude at s = {:.4} vs {:.4} rotated: correlation {corr:.6}",
        s[qb], s[qa]
    ));
    Ok(line)
}

fn qgt_setup(cfg: &RunConfig) -> Result<(QgtModel, f64, PhiDotField)> {
    let (theta, f) = cfg
        .profile
        .combined_parts()
        .ok_or_else(|| Error::Unsupported("qgt needs a combined profile".into()))?;
    let pair = cfg.pair()?;
    let h = cfg.hamiltonian()?;
    let p = match cfg.qgt.p {
        Some(p) => p,
        None => (2.0 * cfg.energy(&h)?).sqrt(),
    };
    let model = QgtModel::new(pair, cfg.curve.torsion().value(0.0));
    let field = PhiDotField::from_profiles(model, p, theta, f, cfg.grid.length);
    Ok((model, p, field))
}

const QGT_COLUMNS: [(&str, &str); 10] = [
    ("omega", "1/a0"),
    ("f", "1"),
    ("phi", "rad"),
    ("phi_dot", "rad/a0"),
    ("lambda", "hbar^2/(m a0^2)"),
    ("g_omega_omega", "a0^2"),
    ("g_omega_f", "a0"),
    ("g_f_f", "1"),
    ("f_omega_f", "a0"),
    ("trig_identity_err", "1"),
];

fn qgt(out: &mut Out, summary: &mut Map<String, Value>) -> Result<String> {
    let cfg = out.cfg;
    let (model, p, field) = qgt_setup(cfg)?;
    let q = &cfg.qgt;
    let at = |k: usize, r: [f64; 2]| r[0] + (r[1] - r[0]) * k as f64 / (q.points - 1) as f64;
    let row = |omega: f64, f: f64, phi_dot: f64| -> Result<(Vec<Cell>, f64)> {
        let pt = qgt_analytic(&model, omega, f, p, phi_dot)?;
        let angle = model.angle(omega, f, p)?;
        let trig = (angle.cos * angle.cos + angle.sin * angle.sin - 1.0).abs();
        Ok((
            vec![
                omega.into(),
                f.into(),
                pt.phi.into(),
                phi_dot.into(),
                pt.lambda.into(),
                pt.metric[(0, 0)].into(),
                pt.metric[(0, 1)].into(),
                pt.metric[(1, 1)].into(),
                pt.curvature[(0, 1)].into(),
                trig.into(),
            ],
            trig,
        ))
    };
    let mut t = ResultTable::new(&QGT_COLUMNS);
    let (mut trig_max, mut oracle_max) = (0.0f64, 0.0f64);
    let mut skipped = 0usize;
    for i in 0..q.points {
        for j in 0..q.points {
            let (omega, f) = (at(i, q.omega), at(j, q.f));
            let point = || -> Result<(Vec<Cell>, f64, f64)> {
                let (cells, trig) = row(omega, f, field.eval(omega, f)?)?;
                let static_metric = qgt_analytic(&model, omega, f, p, 0.0)?.metric;
                let fd = qgt_fd_oracle(&model, omega, f, p, 1e-5)?;
                Ok((cells, trig, (static_metric - fd).amax() / fd.amax().max(1e-300)))
            };
            match point() {
                Ok((cells, trig, err)) => {
                    trig_max = trig_max.max(trig);
                    oracle_max = oracle_max.max(err);
                    t.push(cells);
                }
                Err(Error::DegenerateAngle { .. }) => skipped += 1,
                Err(e) => return Err(e),
            }
        }
    }
    if skipped > 0 {
        log::warn!("qgt grid: {skipped} point(s) at or next to a degeneracy skipped");
    }
    out.table("qgt_grid", &t)?;

    let (theta, f) = cfg.profile.combined_parts().expect("checked in setup");
    let mut path = ResultTable::new(&[("s", "a0")].into_iter().chain(QGT_COLUMNS).collect::<Vec<_>>());
    let n = cfg.wkb.samples;
    for k in 0..=n {
        let s = cfg.grid.length * k as f64 / n as f64;
        let (omega, fv) = (theta.eval(s, 1), f.value(s));
        match phi_dot_path(&model, p, theta, f, s).and_then(|pd| row(omega, fv, pd)) {
            Ok((cells, _)) => {
                let mut r = vec![s.into()];
                r.extend(cells);
                path.push(r);
            }
            Err(Error::DegenerateAngle { .. }) => {
                log::debug!("qgt path: mixing angle undefined at s = {s}, row skipped")
            }
            Err(e) => return Err(e),
        }
    }
    out.table("qgt_path", &path)?;
    put(summary, "p", p);
    put(summary, "grid_points", t.rows.len());
    put(summary, "grid_skipped", skipped);
    put(summary, "max_trig_identity_err", trig_max);
    put(summary, "max_static_metric_oracle_rel_err", oracle_max);
    Ok(format!(
        "qgt: {}x{} grid at p = {p:.4}, |cos^2+sin^2-1| <= {trig_max:.1e}, metric vs oracle {oracle_max:.1e}",
        q.points, q.points
    ))
}

fn berry(out: &mut Out, summary: &mut Map<String, Value>) -> Result<String> {
    let cfg = out.cfg;
    let (model, p, field) = qgt_setup(cfg)?;
    let vertices: Vec<(f64, f64)> = cfg.qgt.vertices.iter().map(|v| (v[0], v[1])).collect();
    let r = berry_loop(&model, &vertices, p, &|w, f| field.eval(w, f), cfg.qgt.resolution)?;
    let diff = (r.area_integral - r.line_integral).abs();
    let mut t = ResultTable::new(&[
        ("area_integral", "rad"),
        ("line_integral", "rad"),
        ("enclosed_area", "1/a0"),
        ("difference", "rad"),
    ]);
    t.push(vec![r.area_integral.into(), r.line_integral.into(), r.enclosed_area.into(), diff.into()]);
    out.table("berry_loop", &t)?;
    put(summary, "area_integral", r.area_integral);
    put(summary, "line_integral", r.line_integral);
    put(summary, "enclosed_area", r.enclosed_area);
    put(summary, "stokes_difference", diff);
    Ok(format!(
        "berry-loop: area {:.10}, line {:.10}, difference {diff:.2e}",
        r.area_integral, r.line_integral
    ))
}

/// Output directory helper for callers that override `outputs.dir`.
pub fn with_dir(cfg: &RunConfig, dir: &Path) -> RunConfig {
    let mut c = cfg.clone();
    c.outputs.dir = dir.to_path_buf();
    c
}
