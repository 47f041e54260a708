use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::Boundary;
use crate::effective::{
    assemble_combined, assemble_rotation_circular, assemble_rotation_square, assemble_scaling_circular,
    assemble_scaling_square, assemble_shearing, Axis, EffectiveHamiltonian,
};
use crate::error::{Error, Result};
use crate::geometry::{CurveSpec, TransformProfile};
use crate::scalar::{Combination, ScalarFn};
use crate::transverse::{circular_mode, square_mode, CrossSection, SquarePair, TransverseMode};

/// Largest δ accepted; above [`DELTA_WARN`] a warning is logged.
pub const DELTA_MAX: f64 = 0.2;
pub const DELTA_WARN: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub curve: CurveSpec,
    pub profile: ProfileConfig,
    pub cross: CrossSection,
    #[serde(default)]
    pub modes: ModesConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub energy: EnergySpec,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub conventions: Conventions,
    #[serde(default)]
    pub wkb: WkbConfig,
    #[serde(default)]
    pub qgt: QgtConfig,
}

/// Cross-section transformation, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Rotation { theta: ScalarFn },
    Scaling { delta: f64, f1: ScalarFn, f2: ScalarFn },
    /// f₂ = −f₁.
    Squeeze { delta: f64, f: ScalarFn },
    Shearing { delta: f64, f: ScalarFn },
    /// rotation θ with the squeeze diag(f, −f)
    Combined { delta: f64, theta: ScalarFn, f: ScalarFn },
}

impl ProfileConfig {
    pub fn delta(&self) -> Option<f64> {
        match self {
            ProfileConfig::Rotation { .. } => None,
            ProfileConfig::Scaling { delta, .. }
            | ProfileConfig::Squeeze { delta, .. }
            | ProfileConfig::Shearing { delta, .. }
            | ProfileConfig::Combined { delta, .. } => Some(*delta),
        }
    }

    pub fn transform(&self) -> TransformProfile {
        match self.clone() {
            ProfileConfig::Rotation { theta } => TransformProfile::rotation(theta),
            ProfileConfig::Scaling { delta, f1, f2 } => TransformProfile::scaling(delta, f1, f2),
            ProfileConfig::Squeeze { delta, f } => TransformProfile::squeeze(delta, f),
            ProfileConfig::Shearing { delta, f } => TransformProfile::shearing(delta, f),
            ProfileConfig::Combined { delta, theta, f } => TransformProfile::combined(delta, theta, f),
        }
    }

    /// θ and f of a combined profile.
    pub fn combined_parts(&self) -> Option<(&ScalarFn, &ScalarFn)> {
        match self {
            ProfileConfig::Combined { theta, f, .. } => Some((theta, f)),
            _ => None,
        }
    }
}

/// Square modes use (n1, n2), circular ones (n, l).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModesConfig {
    pub n1: u32,
    pub n2: u32,
    pub n: u32,
    pub l: i32,
}

impl Default for ModesConfig {
    fn default() -> Self {
        ModesConfig { n1: 1, n2: 2, n: 1, l: 1 }
    }
}

fn default_field_points() -> usize {
    64
}

fn default_field_samples() -> usize {
    16
}

fn default_bc() -> Boundary {
    Boundary::Periodic
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub length: f64,
    pub points: usize,
    #[serde(default = "default_bc")]
    pub bc: Boundary,
    /// cells per side of the cross-section snapshots
    #[serde(default = "default_field_points")]
    pub field_points: usize,
    /// number of snapshots k·length/samples, k = 0..samples
    #[serde(default = "default_field_samples")]
    pub field_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyKeyword {
    Auto,
}

/// `"auto"` or a number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnergySpec {
    Value(f64),
    Keyword(EnergyKeyword),
}

impl Default for EnergySpec {
    fn default() -> Self {
        EnergySpec::Keyword(EnergyKeyword::Auto)
    }
}

impl std::str::FromStr for EnergySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(EnergySpec::Keyword(EnergyKeyword::Auto));
        }
        s.parse::<f64>()
            .map(EnergySpec::Value)
            .map_err(|_| Error::Config(format!("energy must be a number or \"auto\", got {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("format must be csv or json, got {s:?}"))),
        }
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_dir(),
            format: Format::Csv,
        }
    }
}

/// `squeeze_delta`: whether the squeeze coupling of the combined case carries
/// the factor δ (2δfΔE) or not (2fΔE).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Conventions {
    pub squeeze_delta: bool,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions { squeeze_delta: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WkbConfig {
    pub samples: usize,
}

impl Default for WkbConfig {
    fn default() -> Self {
        WkbConfig { samples: 512 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QgtConfig {
    pub omega: [f64; 2],
    pub f: [f64; 2],
    pub points: usize,
    /// axial momentum; √(2E) when absent
    pub p: Option<f64>,
    /// (ω, f) polygon for berry-loop, counter-clockwise
    #[serde(rename = "loop")]
    pub vertices: Vec<[f64; 2]>,
    pub resolution: usize,
}

impl Default for QgtConfig {
    fn default() -> Self {
        QgtConfig {
            omega: [0.0, 0.04],
            f: [-1.0, 1.0],
            points: 50,
            p: None,
            vertices: vec![[0.005, -0.01], [0.035, -0.01], [0.035, 0.03], [0.005, 0.03]],
            resolution: 16,
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {x}")))
    }
}

impl RunConfig {
    /// Helix of radius = rise = 25, rotation rate 0.02 with f = sin(2πs/15),
    /// δ = 0.02 on the (1, 2) pair of the unit square.
    pub fn example() -> Self {
        RunConfig {
            curve: CurveSpec::Helix {
                radius: 25.0,
                rise: 25.0,
            },
            profile: ProfileConfig::Combined {
                delta: 0.02,
                theta: ScalarFn::Linear {
                    value: 0.0,
                    slope: 0.02,
                },
                f: ScalarFn::sine(1.0, 15.0),
            },
            cross: CrossSection::Square { side: 1.0 },
            modes: ModesConfig::default(),
            grid: GridConfig {
                length: 15.0,
                points: 2048,
                bc: Boundary::Periodic,
                field_points: 64,
                field_samples: 16,
            },
            energy: EnergySpec::default(),
            outputs: OutputConfig::default(),
            conventions: Conventions::default(),
            wkb: WkbConfig::default(),
            qgt: QgtConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.curve.validate()?;
        self.cross.validate()?;
        self.transform().validate()?;
        if let Some(delta) = self.profile.delta() {
            if !(delta > 0.0 && delta <= DELTA_MAX) {
                return Err(Error::Config(format!(
                    "profile.delta = {delta} is outside (0, {DELTA_MAX}]"
                )));
            }
            if delta > DELTA_WARN {
                log::warn!("profile.delta = {delta} is above {DELTA_WARN}; the expansion may be poor");
            }
        }
        positive("grid.length", self.grid.length)?;
        if self.grid.points < crate::dynamics::MIN_POINTS {
            return Err(Error::Config(format!(
                "grid.points must be at least {}, got {}",
                crate::dynamics::MIN_POINTS,
                self.grid.points
            )));
        }
        if self.grid.field_points < 4 || self.grid.field_samples < 2 {
            return Err(Error::Config(
                "grid.field_points must be >= 4 and grid.field_samples >= 2".into(),
            ));
        }
        if let EnergySpec::Value(e) = self.energy {
            positive("energy", e)?;
        }
        if self.wkb.samples < 16 {
            return Err(Error::Config(format!("wkb.samples must be >= 16, got {}", self.wkb.samples)));
        }
        if self.qgt.points < 2 || self.qgt.resolution < 1 {
            return Err(Error::Config("qgt.points must be >= 2 and qgt.resolution >= 1".into()));
        }
        if let Some(p) = self.qgt.p {
            positive("qgt.p", p)?;
        }
        if self.qgt.vertices.len() < 3 {
            return Err(Error::Config("qgt.loop needs at least 3 vertices".into()));
        }
        self.mode()?;
        Ok(())
    }

    pub fn transform(&self) -> TransformProfile {
        self.profile.transform()
    }

    pub fn mode(&self) -> Result<TransverseMode> {
        match self.cross {
            CrossSection::Square { side } => square_mode(side, self.modes.n1, self.modes.n2),
            CrossSection::Circular { radius } => circular_mode(radius, self.modes.n, self.modes.l),
        }
    }

    pub fn pair(&self) -> Result<SquarePair> {
        match self.cross {
            CrossSection::Square { side } => SquarePair::new(self.modes.n1, self.modes.n2, side),
            CrossSection::Circular { .. } => Err(Error::Unsupported(
                "a degenerate |+>/|-> pair needs a square cross section".into(),
            )),
        }
    }

    pub fn hamiltonian(&self) -> Result<EffectiveHamiltonian> {
        let axis = Axis::of(&self.curve);
        let omega = |theta: &ScalarFn| Combination::zero().plus_derivative(1.0, theta, 1);
        let square = matches!(self.cross, CrossSection::Square { .. });
        Ok(match &self.profile {
            ProfileConfig::Rotation { theta } if square => {
                assemble_rotation_square(&axis, &omega(theta), &self.pair()?)
            }
            ProfileConfig::Rotation { theta } => assemble_rotation_circular(&axis, &omega(theta), self.modes.l),
            ProfileConfig::Scaling { delta, f1, f2 } => self.scaling(&axis, f1, f2, *delta)?,
            ProfileConfig::Squeeze { delta, f } => self.scaling(&axis, f, &f.scaled(-1.0), *delta)?,
            ProfileConfig::Shearing { delta, f } => {
                assemble_shearing(&axis, &f.scaled(*delta), &self.cross, &self.mode()?)?
            }
            ProfileConfig::Combined { delta, theta, f } if square => assemble_combined(
                &axis,
                &omega(theta),
                f,
                *delta,
                &self.pair()?,
                self.conventions.squeeze_delta,
            ),
            ProfileConfig::Combined { theta, .. } => {
                // a squeeze leaves a circular mode untouched
                assemble_rotation_circular(&axis, &omega(theta), self.modes.l)
            }
        })
    }

    fn scaling(&self, axis: &Axis, f1: &ScalarFn, f2: &ScalarFn, delta: f64) -> Result<EffectiveHamiltonian> {
        match self.cross {
            CrossSection::Square { .. } => Ok(assemble_scaling_square(axis, f1, f2, delta, &self.pair()?)),
            CrossSection::Circular { .. } => assemble_scaling_circular(axis, f1, f2, delta, &self.mode()?),
        }
    }

    /// E itself, or 100·max(|2δfΔE|, α²/2) over the grid for `auto`.
    pub fn energy(&self, h: &EffectiveHamiltonian) -> Result<f64> {
        match self.energy {
            EnergySpec::Value(e) => Ok(e),
            EnergySpec::Keyword(EnergyKeyword::Auto) => {
                let n = self.grid.points;
                let scale = (0..n)
                    .map(|j| {
                        let s = self.grid.length * j as f64 / n as f64;
                        let a = h.alpha(s);
                        let g = if h.dim == 2 { h.coupling(s).abs() } else { 0.0 };
                        g.max(0.5 * a * a)
                    })
                    .fold(0.0, f64::max);
                if scale > 0.0 {
                    Ok(100.0 * scale)
                } else {
                    Err(Error::Config(
                        "energy \"auto\" needs a nonzero gauge or coupling; give a number".into(),
                    ))
                }
            }
        }
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    RunConfig::from_json(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}
