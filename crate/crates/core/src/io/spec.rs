//! Deformation specs: line-oriented `key = value` files naming a boundary
//! motion, the algorithm to run and its options.
//!
//! ```text
//! # rotate the outer circle of an annulus by 45 degrees
//! motion = annulus
//! theta_outer = 45deg
//! algorithm = small_step
//! scheme = fem
//! min_step = 0.0078125
//! ```
//!
//! Motion keys: `motion` (affine, annulus, shear, paper3d, tabulated),
//! `matrix` and `vector` (affine, row-major), `r`, `s`, `theta_outer`
//! (alias `theta`) and `theta_inner` (annulus), `alpha` (shear, paper3d),
//! `frames` (tabulated: whitespace-separated `.node` paths, relative to the
//! spec file). Angles are radians unless suffixed with `deg`.
//!
//! Run keys: `algorithm` (femwarp, small_step, untangle, hybrid), `scheme`
//! (fem, uniform, log_barrier), `min_step`, `max_step` (fractions of the
//! motion), `min_step_abs` (smallest increment in units of the motion
//! parameter, overriding `min_step`), `step_mode` (variable, constant),
//! `max_sweeps`, `continue` (tabulated motions only).

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::assembly::Scheme;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::untangle::{hybrid_warp, untangle_from_original, DEFAULT_MAX_SWEEPS};
use crate::warp::{
    femwarp, small_step_femwarp, warp_trajectory, BoundaryMotion, SmallStepOptions, StepMode, TrajectoryOptions,
    UntangleSummary, WarpReport,
};

use super::mesh_files::read_node_file;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Algorithm {
    #[default]
    Femwarp,
    SmallStep,
    Untangle,
    Hybrid,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Femwarp,
        Algorithm::SmallStep,
        Algorithm::Untangle,
        Algorithm::Hybrid,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Femwarp => "femwarp",
            Algorithm::SmallStep => "small_step",
            Algorithm::Untangle => "untangle",
            Algorithm::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        match norm.as_str() {
            "femwarp" => Ok(Algorithm::Femwarp),
            "small_step" | "smallstep" | "ssfemwarp" => Ok(Algorithm::SmallStep),
            "untangle" | "opt_ms" => Ok(Algorithm::Untangle),
            "hybrid" => Ok(Algorithm::Hybrid),
            _ => Err(Error::InvalidSpec(format!("unknown algorithm {s:?}"))),
        }
    }
}

/// Boundary motion as written in a spec. Unlike [`BoundaryMotion`] it may
/// leave the annulus radii to be inferred from a mesh, and names frame
/// files instead of holding their coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum MotionSpec {
    Affine {
        l: Vec<f64>,
        v: Vec<f64>,
    },
    Annulus {
        r: Option<f64>,
        s: Option<f64>,
        theta_outer: f64,
        theta_inner: f64,
    },
    Shear {
        alpha: f64,
    },
    Paper3d {
        alpha: f64,
    },
    Tabulated {
        frames: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformationSpec {
    pub motion: MotionSpec,
    pub algorithm: Algorithm,
    pub scheme: Scheme,
    pub small_step: SmallStepOptions,
    pub min_step_abs: Option<f64>,
    pub max_sweeps: usize,
    pub continue_on_reversal: bool,
}

impl DeformationSpec {
    pub fn new(motion: MotionSpec) -> DeformationSpec {
        DeformationSpec {
            motion,
            algorithm: Algorithm::default(),
            scheme: Scheme::default(),
            small_step: SmallStepOptions::default(),
            min_step_abs: None,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            continue_on_reversal: false,
        }
    }

    /// Parses spec text. Relative frame paths are resolved against `dir`.
    pub fn parse(text: &str, dir: &Path) -> Result<DeformationSpec> {
        let mut kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidSpec(format!("line {}: expected key = value", i + 1)))?;
            let key = match k.trim().to_ascii_lowercase().as_str() {
                "theta" => "theta_outer".to_string(),
                other => other.to_string(),
            };
            if kv.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(Error::InvalidSpec(format!("line {}: duplicate key {key:?}", i + 1)));
            }
        }
        let mut p = Fields { kv };
        let kind = p.take("motion").ok_or_else(|| Error::InvalidSpec("missing key \"motion\"".into()))?;
        let motion = match kind.to_ascii_lowercase().as_str() {
            "affine" => {
                let l = p.floats("matrix")?.ok_or_else(|| Error::InvalidSpec("affine motion needs \"matrix\"".into()))?;
                let d = match l.len() {
                    4 => 2,
                    9 => 3,
                    n => return Err(Error::InvalidSpec(format!("affine matrix needs 4 or 9 entries, got {n}"))),
                };
                let v = p.floats("vector")?.unwrap_or_else(|| vec![0.0; d]);
                if v.len() != d {
                    return Err(Error::InvalidSpec(format!("affine vector needs {d} entries, got {}", v.len())));
                }
                MotionSpec::Affine { l, v }
            }
            "annulus" => MotionSpec::Annulus {
                r: p.float("r")?,
                s: p.float("s")?,
                theta_outer: p.angle("theta_outer")?.unwrap_or(0.0),
                theta_inner: p.angle("theta_inner")?.unwrap_or(0.0),
            },
            "shear" => MotionSpec::Shear {
                alpha: p.float("alpha")?.ok_or_else(|| Error::InvalidSpec("shear motion needs \"alpha\"".into()))?,
            },
            "paper3d" => MotionSpec::Paper3d {
                alpha: p
                    .float("alpha")?
                    .ok_or_else(|| Error::InvalidSpec("paper3d motion needs \"alpha\"".into()))?,
            },
            "tabulated" => {
                let frames: Vec<PathBuf> = p
                    .take("frames")
                    .ok_or_else(|| Error::InvalidSpec("tabulated motion needs \"frames\"".into()))?
                    .split_whitespace()
                    .map(|f| dir.join(f))
                    .collect();
                if frames.is_empty() {
                    return Err(Error::InvalidSpec("tabulated motion has no frames".into()));
                }
                MotionSpec::Tabulated { frames }
            }
            other => return Err(Error::InvalidSpec(format!("unknown motion {other:?}"))),
        };
        let mut spec = DeformationSpec::new(motion);
        if let Some(a) = p.take("algorithm") {
            spec.algorithm = a.parse()?;
        }
        if let Some(s) = p.take("scheme") {
            spec.scheme = s.parse()?;
        }
        if let Some(m) = p.float("min_step")? {
            spec.small_step.min_step = m;
        }
        spec.small_step.max_step = p.float("max_step")?;
        spec.min_step_abs = p.float("min_step_abs")?;
        if let Some(m) = p.take("step_mode") {
            spec.small_step.mode = match m.to_ascii_lowercase().as_str() {
                "variable" => StepMode::Variable,
                "constant" => StepMode::Constant,
                _ => return Err(Error::InvalidSpec(format!("unknown step_mode {m:?}"))),
            };
        }
        if let Some(m) = p.take("max_sweeps") {
            spec.max_sweeps = m
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("max_sweeps must be a count, got {m:?}")))?;
        }
        if let Some(c) = p.take("continue") {
            spec.continue_on_reversal = match c.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => true,
                "false" | "no" | "0" => false,
                _ => return Err(Error::InvalidSpec(format!("continue must be true or false, got {c:?}"))),
            };
        }
        if let Some((k, (line, _))) = p.kv.iter().next() {
            return Err(Error::InvalidSpec(format!("line {line}: unknown or unused key {k:?}")));
        }
        spec.check()?;
        Ok(spec)
    }

    pub fn read(path: &Path) -> Result<DeformationSpec> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        DeformationSpec::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn check(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("{name} must be positive, got {v}")))
            }
        };
        positive("min_step", self.small_step.min_step)?;
        if let Some(m) = self.small_step.max_step {
            positive("max_step", m)?;
        }
        if let Some(m) = self.min_step_abs {
            positive("min_step_abs", m)?;
        }
        if let MotionSpec::Annulus { r, s, .. } = &self.motion {
            for (name, v) in [("r", r), ("s", s)] {
                if let Some(v) = v {
                    if !(*v > 0.0 && *v < 1.0) {
                        return Err(Error::InvalidSpec(format!("annulus {name} must lie in (0, 1), got {v}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Name of the parameter a sweep varies, if the motion has one.
    pub fn sweep_parameter(&self) -> Option<&'static str> {
        match self.motion {
            MotionSpec::Annulus { .. } => Some("theta_outer"),
            MotionSpec::Shear { .. } | MotionSpec::Paper3d { .. } => Some("alpha"),
            _ => None,
        }
    }

    /// Copy with the sweep parameter set to `value`.
    pub fn with_parameter(&self, value: f64) -> Result<DeformationSpec> {
        let mut out = self.clone();
        match &mut out.motion {
            MotionSpec::Annulus { theta_outer, .. } => *theta_outer = value,
            MotionSpec::Shear { alpha } | MotionSpec::Paper3d { alpha } => *alpha = value,
            _ => {
                return Err(Error::InvalidSpec(
                    "only annulus, shear and paper3d motions can be swept".into(),
                ))
            }
        }
        Ok(out)
    }

    /// Magnitude of the sweep parameter, used to convert `min_step_abs`.
    fn parameter_magnitude(&self) -> Option<f64> {
        match &self.motion {
            MotionSpec::Annulus {
                theta_outer,
                theta_inner,
                ..
            } => Some(theta_outer.abs().max(theta_inner.abs())),
            MotionSpec::Shear { alpha } | MotionSpec::Paper3d { alpha } => Some(alpha.abs()),
            _ => None,
        }
    }

    /// Small-step options with `min_step_abs` converted to a fraction.
    pub fn small_step_options(&self) -> SmallStepOptions {
        let mut o = self.small_step;
        if let (Some(abs), Some(mag)) = (self.min_step_abs, self.parameter_magnitude()) {
            if mag > 0.0 {
                o.min_step = (abs / mag).min(1.0);
            }
        }
        o
    }

    /// Resolves the motion against `mesh`, reading frame files if needed.
    pub fn to_motion(&self, mesh: &Mesh) -> Result<BoundaryMotion> {
        Ok(match &self.motion {
            MotionSpec::Affine { l, v } => BoundaryMotion::Affine {
                l: l.clone(),
                v: v.clone(),
            },
            MotionSpec::Annulus {
                r,
                s,
                theta_outer,
                theta_inner,
            } => {
                let r = match r {
                    Some(r) => *r,
                    None => inner_radius(mesh)?,
                };
                BoundaryMotion::Annulus {
                    r,
                    s: s.unwrap_or(r),
                    theta_outer: *theta_outer,
                    theta_inner: *theta_inner,
                }
            }
            MotionSpec::Shear { alpha } => BoundaryMotion::Shear { alpha: *alpha },
            MotionSpec::Paper3d { alpha } => BoundaryMotion::Paper3d { alpha: *alpha },
            MotionSpec::Tabulated { frames } => BoundaryMotion::Tabulated {
                frames: read_frames(frames, mesh)?,
            },
        })
    }

    /// Runs the spec's algorithm on `mesh`.
    pub fn run(&self, mesh: &Mesh) -> Result<RunOutput> {
        let motion = self.to_motion(mesh)?;
        if let (BoundaryMotion::Tabulated { frames }, Algorithm::Femwarp | Algorithm::SmallStep) =
            (&motion, self.algorithm)
        {
            let opts = TrajectoryOptions {
                small_step: (self.algorithm == Algorithm::SmallStep).then(|| self.small_step_options()),
                continue_on_reversal: self.continue_on_reversal,
            };
            let mut traj = warp_trajectory(mesh, self.scheme, frames, opts)?;
            let report = traj.reports.pop().expect("at least one frame");
            let mesh = traj.meshes.pop().expect("at least one frame");
            return Ok(RunOutput {
                mesh,
                report,
                failed_frame: traj.failed_frame,
            });
        }
        let (mesh, report) = match self.algorithm {
            Algorithm::Femwarp => femwarp(mesh, self.scheme, &motion)?,
            Algorithm::SmallStep => small_step_femwarp(mesh, self.scheme, &motion, self.small_step_options())?,
            Algorithm::Hybrid => hybrid_warp(mesh, self.scheme, &motion, self.max_sweeps)?,
            Algorithm::Untangle => {
                let res = untangle_from_original(mesh, &motion, self.max_sweeps)?;
                let mut report = WarpReport::finish(&res.mesh, Vec::new(), 0, 1.0);
                report.untangle = Some(UntangleSummary {
                    outcome: res.outcome,
                    sweeps: res.sweeps,
                });
                (res.mesh, report)
            }
        };
        Ok(RunOutput {
            mesh,
            report,
            failed_frame: None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub mesh: Mesh,
    pub report: WarpReport,
    /// First tabulated frame (0-based) that ended with reversals.
    pub failed_frame: Option<usize>,
}

/// Smallest node distance from the origin.
fn inner_radius(mesh: &Mesh) -> Result<f64> {
    if mesh.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: mesh.dim(),
        });
    }
    Ok((0..mesh.n_nodes())
        .map(|i| {
            let p = mesh.point(i);
            p[0].hypot(p[1])
        })
        .fold(f64::INFINITY, f64::min))
}

fn read_frames(paths: &[PathBuf], mesh: &Mesh) -> Result<Vec<Vec<f64>>> {
    paths
        .iter()
        .map(|p| {
            let t = read_node_file(p)?;
            if t.dim != mesh.dim() || t.n_nodes() != mesh.n_nodes() {
                return Err(Error::DimensionMismatch {
                    expected: mesh.coords().len(),
                    got: t.coords.len(),
                });
            }
            Ok(t.coords)
        })
        .collect()
}

struct Fields {
    kv: BTreeMap<String, (usize, String)>,
}

impl Fields {
    fn take(&mut self, key: &str) -> Option<String> {
        self.kv.remove(key).map(|(_, v)| v)
    }

    fn float(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key).map(|v| parse_float(key, &v)).transpose()
    }

    fn floats(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        self.take(key)
            .map(|v| v.split([' ', ',', '\t']).filter(|t| !t.is_empty()).map(|t| parse_float(key, t)).collect())
            .transpose()
    }

    fn angle(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key).map(|v| parse_angle(key, &v)).transpose()
    }
}

fn parse_float(key: &str, v: &str) -> Result<f64> {
    match v.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::InvalidSpec(format!("{key}: expected a finite number, got {v:?}"))),
    }
}

/// Radians, or degrees with a `deg` suffix.
pub fn parse_angle(key: &str, v: &str) -> Result<f64> {
    let v = v.trim();
    match v.strip_suffix("deg") {
        Some(d) => Ok(parse_float(key, d)?.to_radians()),
        None => parse_float(key, v),
    }
}
