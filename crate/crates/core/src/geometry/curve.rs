use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Pchip, ScalarFn};

/// Orthonormal right-handed Frenet triad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub t: Vector3<f64>,
    pub n: Vector3<f64>,
    pub b: Vector3<f64>,
}

impl Frame {
    pub fn standard() -> Self {
        Frame {
            t: Vector3::x(),
            n: Vector3::y(),
            b: Vector3::z(),
        }
    }

    /// Largest deviation from orthonormality and from `t × n = b`.
    pub fn orthonormality_defect(&self) -> f64 {
        let dots = [
            self.t.norm() - 1.0,
            self.n.norm() - 1.0,
            self.b.norm() - 1.0,
            self.t.dot(&self.n),
            self.t.dot(&self.b),
            self.n.dot(&self.b),
        ];
        let hand = (self.t.cross(&self.n) - self.b).amax();
        dots.iter().map(|d| d.abs()).fold(hand, f64::max)
    }

    fn reorthonormalize(&mut self) {
        self.t = self.t.normalize();
        self.n = (self.n - self.t * self.t.dot(&self.n)).normalize();
        self.b = self.t.cross(&self.n);
    }
}

/// Position, frame and Frenet invariants at one arc-length value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisPoint {
    pub position: Vector3<f64>,
    pub frame: Frame,
    pub curvature: f64,
    pub torsion: f64,
}

/// Axis curve of the tube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    /// Helix of radius `radius` advancing `rise` per radian (pitch 2π·rise).
    Helix { radius: f64, rise: f64 },
    Tabulated(TabulatedCurve),
}

impl CurveSpec {
    pub fn helix(radius: f64, rise: f64) -> Result<Self> {
        let c = CurveSpec::Helix { radius, rise };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CurveSpec::Helix { radius, rise } => {
                if !(radius.is_finite() && rise.is_finite()) || *radius < 0.0 {
                    return Err(Error::InvalidCurve(format!(
                        "helix needs finite radius >= 0 and finite rise (got {radius}, {rise})"
                    )));
                }
                if *radius == 0.0 && *rise == 0.0 {
                    return Err(Error::InvalidCurve("degenerate helix".into()));
                }
                Ok(())
            }
            CurveSpec::Tabulated(_) => Ok(()),
        }
    }

    pub fn curvature(&self) -> ScalarFn {
        match self {
            CurveSpec::Helix { radius, rise } => {
                ScalarFn::Const(radius / (radius * radius + rise * rise))
            }
            CurveSpec::Tabulated(t) => ScalarFn::Tabulated(t.curvature.clone()),
        }
    }

    pub fn torsion(&self) -> ScalarFn {
        match self {
            CurveSpec::Helix { radius, rise } => {
                ScalarFn::Const(rise / (radius * radius + rise * rise))
            }
            CurveSpec::Tabulated(t) => ScalarFn::Tabulated(t.torsion.clone()),
        }
    }

    /// Position, Frenet frame, κ and τ at `s`.
    pub fn evaluate(&self, s: f64) -> Result<AxisPoint> {
        let point = match self {
            CurveSpec::Helix { radius, rise } => helix_point(*radius, *rise, s),
            CurveSpec::Tabulated(t) => t.evaluate(s)?,
        };
        if point.curvature <= 0.0 {
            return Err(Error::FrameUndefined { s });
        }
        Ok(point)
    }
}

/// Frenet frame of `curve` at `s`.
pub fn frenet_frame(curve: &CurveSpec, s: f64) -> Result<Frame> {
    curve.evaluate(s).map(|p| p.frame)
}

fn helix_point(r: f64, b: f64, s: f64) -> AxisPoint {
    let c = (r * r + b * b).sqrt();
    let (sn, cs) = (s / c).sin_cos();
    AxisPoint {
        position: Vector3::new(r * cs, r * sn, b * s / c),
        frame: Frame {
            t: Vector3::new(-r / c * sn, r / c * cs, b / c),
            n: Vector3::new(-cs, -sn, 0.0),
            b: Vector3::new(b / c * sn, -b / c * cs, r / c),
        },
        curvature: r / (c * c),
        torsion: b / (c * c),
    }
}

/// Curve given by sampled κ(s), τ(s); the frame is integrated from the
/// first knot with classical fourth-order steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TabulatedSpec", into = "TabulatedSpec")]
pub struct TabulatedCurve {
    spec: TabulatedSpec,
    curvature: Pchip,
    torsion: Pchip,
    nodes: Vec<State>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedSpec {
    pub s: Vec<f64>,
    pub curvature: Vec<f64>,
    pub torsion: Vec<f64>,
    /// Integration step along s.
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default)]
    pub origin: [f64; 3],
    /// Initial (t, n, b); defaults to the Cartesian basis.
    #[serde(default)]
    pub frame: Option<[[f64; 3]; 3]>,
}

fn default_step() -> f64 {
    1e-2
}

impl TryFrom<TabulatedSpec> for TabulatedCurve {
    type Error = Error;
    fn try_from(spec: TabulatedSpec) -> Result<Self> {
        TabulatedCurve::new(spec)
    }
}

impl From<TabulatedCurve> for TabulatedSpec {
    fn from(c: TabulatedCurve) -> Self {
        c.spec
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct State {
    r: Vector3<f64>,
    frame: Frame,
}

impl TabulatedCurve {
    pub fn new(spec: TabulatedSpec) -> Result<Self> {
        if spec.curvature.iter().any(|k| *k < 0.0) {
            return Err(Error::InvalidCurve("curvature samples must be >= 0".into()));
        }
        let curvature = Pchip::new(spec.s.clone(), spec.curvature.clone())
            .map_err(|e| Error::InvalidCurve(format!("curvature table: {e}")))?;
        let torsion = Pchip::new(spec.s.clone(), spec.torsion.clone())
            .map_err(|e| Error::InvalidCurve(format!("torsion table: {e}")))?;
        if !(spec.step > 0.0 && spec.step.is_finite()) {
            return Err(Error::InvalidCurve(format!("step must be positive, got {}", spec.step)));
        }
        let frame = match spec.frame {
            None => Frame::standard(),
            Some([t, n, b]) => Frame {
                t: Vector3::from(t),
                n: Vector3::from(n),
                b: Vector3::from(b),
            },
        };
        if frame.orthonormality_defect() > 1e-10 {
            return Err(Error::InvalidCurve(
                "initial frame is not orthonormal and right-handed".into(),
            ));
        }
        let mut curve = TabulatedCurve {
            curvature,
            torsion,
            nodes: Vec::new(),
            spec,
        };
        let (a, b) = curve.curvature.domain();
        let steps = ((b - a) / curve.spec.step).ceil() as usize;
        let mut state = State {
            r: Vector3::from(curve.spec.origin),
            frame,
        };
        curve.nodes.reserve(steps + 1);
        curve.nodes.push(state);
        for i in 0..steps {
            state = curve.rk4(state, a + i as f64 * curve.spec.step, curve.spec.step);
            curve.nodes.push(state);
        }
        Ok(curve)
    }

    pub fn spec(&self) -> &TabulatedSpec {
        &self.spec
    }

    pub fn domain(&self) -> (f64, f64) {
        self.curvature.domain()
    }

    fn evaluate(&self, s: f64) -> Result<AxisPoint> {
        let (a, b) = self.domain();
        if !(a..=b).contains(&s) {
            return Err(Error::InvalidInput(format!(
                "s = {s} outside tabulated range [{a}, {b}]"
            )));
        }
        let i = (((s - a) / self.spec.step).floor() as usize).min(self.nodes.len() - 1);
        let s_i = a + i as f64 * self.spec.step;
        let state = if s > s_i {
            self.rk4(self.nodes[i], s_i, s - s_i)
        } else {
            self.nodes[i]
        };
        Ok(AxisPoint {
            position: state.r,
            frame: state.frame,
            curvature: self.curvature.eval(s, 0),
            torsion: self.torsion.eval(s, 0),
        })
    }

    fn rhs(&self, s: f64, y: &State) -> State {
        let k = self.curvature.eval(s, 0);
        let tau = self.torsion.eval(s, 0);
        let f = &y.frame;
        State {
            r: f.t,
            frame: Frame {
                t: f.n * k,
                n: -f.t * k + f.b * tau,
                b: -f.n * tau,
            },
        }
    }

    fn rk4(&self, y: State, s: f64, h: f64) -> State {
        let add = |y: &State, k: &State, c: f64| State {
            r: y.r + k.r * c,
            frame: Frame {
                t: y.frame.t + k.frame.t * c,
                n: y.frame.n + k.frame.n * c,
                b: y.frame.b + k.frame.b * c,
            },
        };
        let k1 = self.rhs(s, &y);
        let k2 = self.rhs(s + h / 2.0, &add(&y, &k1, h / 2.0));
        let k3 = self.rhs(s + h / 2.0, &add(&y, &k2, h / 2.0));
        let k4 = self.rhs(s + h, &add(&y, &k3, h));
        let mut out = y;
        for (k, c) in [(&k1, 1.0), (&k2, 2.0), (&k3, 2.0), (&k4, 1.0)] {
            out = add(&out, k, c * h / 6.0);
        }
        out.frame.reorthonormalize();
        out
    }
}
