//! Warping drivers: one-shot, small-step with stepsize halving, and
//! trajectories over tabulated frames.

use std::fmt;

use crate::analytic::{paper3d_map, rectangle_shear_map};
use crate::assembly::{has_unusable_element, Scheme, WeightSystem};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::quality::QualityReport;
use crate::solve::Factorization;

/// Prescribed motion of the boundary nodes, parameterized by the fraction
/// `t ∈ [0, 1]` of the full deformation. Always evaluated against the
/// original (undeformed) mesh.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryMotion {
    /// `p ↦ ((1 − t) I + t L) p + t v`, `L` row-major `d × d`.
    Affine { l: Vec<f64>, v: Vec<f64> },
    /// Annulus centered at the origin with inner radius `r`: the outer
    /// circle turns clockwise by `t θ_outer`, the inner circle clockwise by
    /// `t θ_inner` while its radius grows to `r + t (s − r)`. Nodes closer
    /// to the origin than `(1 + r)/2` belong to the inner circle.
    Annulus {
        r: f64,
        s: f64,
        theta_outer: f64,
        theta_inner: f64,
    },
    /// `(x, y) ↦ (x, y + t α x (2 − x))`.
    Shear { alpha: f64 },
    /// Straight-line path from the identity to the nonlinear 3D map with
    /// parameter `alpha`.
    Paper3d { alpha: f64 },
    /// Piecewise-linear path through full coordinate arrays, one per frame,
    /// with frame `k` reached at `t = k / frames.len()`. Only boundary rows
    /// are used.
    Tabulated { frames: Vec<Vec<f64>> },
}

impl BoundaryMotion {
    pub fn identity(dim: usize) -> BoundaryMotion {
        let mut l = vec![0.0; dim * dim];
        for k in 0..dim {
            l[k * dim + k] = 1.0;
        }
        BoundaryMotion::Affine { l, v: vec![0.0; dim] }
    }

    pub fn annulus_rotation(r: f64, theta: f64) -> BoundaryMotion {
        BoundaryMotion::Annulus {
            r,
            s: r,
            theta_outer: theta,
            theta_inner: 0.0,
        }
    }

    fn check(&self, mesh: &Mesh) -> Result<()> {
        let d = mesh.dim();
        match self {
            BoundaryMotion::Affine { l, v } if l.len() != d * d || v.len() != d => Err(Error::DimensionMismatch {
                expected: d,
                got: v.len(),
            }),
            BoundaryMotion::Annulus { r, s, .. } if d != 2 || !(*r > 0.0 && *r < 1.0 && *s > 0.0 && *s < 1.0) => {
                Err(Error::InvalidSpec(format!("annulus motion needs a 2D mesh and radii in (0, 1), got r = {r}, s = {s}")))
            }
            BoundaryMotion::Shear { .. } if d != 2 => Err(Error::DimensionMismatch { expected: 2, got: d }),
            BoundaryMotion::Paper3d { .. } if d != 3 => Err(Error::DimensionMismatch { expected: 3, got: d }),
            BoundaryMotion::Tabulated { frames } => {
                if frames.is_empty() {
                    return Err(Error::InvalidSpec("tabulated motion has no frames".into()));
                }
                match frames.iter().find(|f| f.len() != mesh.coords().len()) {
                    Some(f) => Err(Error::DimensionMismatch {
                        expected: mesh.coords().len(),
                        got: f.len(),
                    }),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    /// Position of `node` (original position `p`) at fraction `t`.
    fn point(&self, node: usize, p: &[f64], t: f64, out: &mut [f64]) {
        let d = p.len();
        match self {
            BoundaryMotion::Affine { l, v } => {
                for i in 0..d {
                    let lp: f64 = (0..d).map(|j| l[i * d + j] * p[j]).sum();
                    out[i] = (1.0 - t) * p[i] + t * (lp + v[i]);
                }
            }
            BoundaryMotion::Annulus {
                r,
                s,
                theta_outer,
                theta_inner,
            } => {
                let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
                let (angle, scale) = if rho > 0.5 * (1.0 + r) {
                    (-t * theta_outer, 1.0)
                } else {
                    (-t * theta_inner, (r + t * (s - r)) / r)
                };
                let (sn, cs) = angle.sin_cos();
                out[0] = scale * (cs * p[0] - sn * p[1]);
                out[1] = scale * (sn * p[0] + cs * p[1]);
            }
            BoundaryMotion::Shear { alpha } => {
                out.copy_from_slice(&rectangle_shear_map(t * alpha, [p[0], p[1]]));
            }
            BoundaryMotion::Paper3d { alpha } => {
                let f = paper3d_map(*alpha, [p[0], p[1], p[2]]);
                for i in 0..3 {
                    out[i] = (1.0 - t) * p[i] + t * f[i];
                }
            }
            BoundaryMotion::Tabulated { frames } => {
                let k = frames.len();
                let st = (t.clamp(0.0, 1.0) * k as f64).min(k as f64);
                let seg = (st.floor() as usize).min(k - 1);
                let w = st - seg as f64;
                let at = |f: usize, i: usize| if f == 0 { p[i] } else { frames[f - 1][node * d + i] };
                for i in 0..d {
                    out[i] = (1.0 - w) * at(seg, i) + w * at(seg + 1, i);
                }
            }
        }
    }

    /// Coordinates of every node with boundary nodes moved to fraction `t`
    /// and interior nodes left at their original positions.
    pub fn evaluate(&self, original: &Mesh, t: f64) -> Result<Vec<f64>> {
        self.check(original)?;
        let d = original.dim();
        let mut coords = original.coords().to_vec();
        for i in original.boundary_nodes() {
            self.point(i, original.point(i), t, &mut coords[i * d..(i + 1) * d]);
        }
        Ok(coords)
    }

    /// Per-axis boundary coordinates at fraction `t`, in ascending node
    /// order (the block order of [`WeightSystem`]).
    pub fn boundary_target(&self, original: &Mesh, t: f64) -> Result<Vec<Vec<f64>>> {
        self.check(original)?;
        let d = original.dim();
        let ids = original.boundary_nodes();
        let mut out = vec![Vec::with_capacity(ids.len()); d];
        let mut buf = vec![0.0; d];
        for i in ids {
            self.point(i, original.point(i), t, &mut buf);
            for k in 0..d {
                out[k].push(buf[k]);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Reversed,
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Success => "SUCCESS",
            Outcome::Reversed => "REVERSED",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t_start: f64,
    pub t_end: f64,
    pub accepted: bool,
    pub reversals: usize,
}

/// Untangling summary attached by the hybrid driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UntangleSummary {
    pub outcome: crate::untangle::UntangleOutcome,
    pub sweeps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WarpReport {
    pub outcome: Outcome,
    pub steps: Vec<StepRecord>,
    /// Numeric factorizations performed.
    pub n_factorizations: usize,
    /// Fraction of the motion achieved by the returned mesh.
    pub t_reached: f64,
    pub untangle: Option<UntangleSummary>,
    pub quality: QualityReport,
}

impl WarpReport {
    pub(crate) fn finish(mesh: &Mesh, steps: Vec<StepRecord>, n_factorizations: usize, t_reached: f64) -> WarpReport {
        let quality = mesh.quality();
        WarpReport {
            outcome: if quality.reversals == 0 { Outcome::Success } else { Outcome::Reversed },
            steps,
            n_factorizations,
            t_reached,
            untangle: None,
            quality,
        }
    }

    pub fn is_success(&self) -> bool {
        self.outcome == Outcome::Success
    }

    pub fn accepted_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.accepted).count()
    }
}

/// Flat `key = value` lines in a fixed order.
impl fmt::Display for WarpReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "outcome = {}", self.outcome)?;
        writeln!(f, "t_reached = {:e}", self.t_reached)?;
        writeln!(f, "n_factorizations = {}", self.n_factorizations)?;
        writeln!(f, "n_steps = {}", self.steps.len())?;
        writeln!(f, "n_accepted = {}", self.accepted_steps())?;
        if let Some(u) = &self.untangle {
            writeln!(f, "untangle_outcome = {}", u.outcome)?;
            writeln!(f, "untangle_sweeps = {}", u.sweeps)?;
        }
        write!(f, "{}", self.quality)
    }
}

/// Mesh with boundary nodes at `target` and interior nodes solving
/// `A_I X_I = −A_B X_B`.
fn place(mesh: &Mesh, ws: &WeightSystem, fac: &Factorization, target: &[Vec<f64>]) -> Result<Mesh> {
    let interior = fac.solve_multi(&ws.rhs(target)?)?;
    let d = mesh.dim();
    let mut coords = mesh.coords().to_vec();
    for (k, &i) in ws.boundary_ids().iter().enumerate() {
        for a in 0..d {
            coords[i * d + a] = target[a][k];
        }
    }
    for (k, &i) in ws.interior_ids().iter().enumerate() {
        for a in 0..d {
            coords[i * d + a] = interior[a][k];
        }
    }
    mesh.with_coords(coords)
}

/// One linear solve per axis with weights built from `mesh`. The mesh is
/// returned even when reversed.
pub fn femwarp_step(mesh: &Mesh, weights: &WeightSystem, target: &[Vec<f64>]) -> Result<(Mesh, WarpReport)> {
    if target.len() != mesh.dim() {
        return Err(Error::DimensionMismatch {
            expected: mesh.dim(),
            got: target.len(),
        });
    }
    if let Some(t) = target.iter().find(|t| t.len() != weights.n_boundary()) {
        return Err(Error::DimensionMismatch {
            expected: weights.n_boundary(),
            got: t.len(),
        });
    }
    let fac = weights.factor()?;
    let out = place(mesh, weights, &fac, target)?;
    let reversals = out.count_reversals().count();
    let steps = vec![StepRecord {
        t_start: 0.0,
        t_end: 1.0,
        accepted: reversals == 0,
        reversals,
    }];
    let report = WarpReport::finish(&out, steps, 1, 1.0);
    Ok((out, report))
}

/// One-shot warp to the full motion.
pub fn femwarp(mesh: &Mesh, scheme: Scheme, motion: &BoundaryMotion) -> Result<(Mesh, WarpReport)> {
    let ws = WeightSystem::build(mesh, scheme)?;
    femwarp_step(mesh, &ws, &motion.boundary_target(mesh, 1.0)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepMode {
    /// Try the full remaining motion and halve on reversal.
    #[default]
    Variable,
    /// Advance by exactly `min_step` each time; stop at the first reversal.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallStepOptions {
    /// Smallest increment tried, as a fraction of the motion.
    pub min_step: f64,
    /// Largest increment tried; `None` means the whole remaining motion.
    pub max_step: Option<f64>,
    pub mode: StepMode,
}

impl Default for SmallStepOptions {
    fn default() -> Self {
        SmallStepOptions {
            min_step: 1.0 / 128.0,
            max_step: None,
            mode: StepMode::Variable,
        }
    }
}

/// Homotopy warp. Each trial reuses the factorization of the current mesh;
/// after an accepted step the weights are rebuilt from the new mesh and
/// refactored.
///
/// On failure the returned mesh is the last reversal-free one and the
/// report's `t_reached` tells how far it got.
pub fn small_step_femwarp(
    mesh: &Mesh,
    scheme: Scheme,
    motion: &BoundaryMotion,
    opts: SmallStepOptions,
) -> Result<(Mesh, WarpReport)> {
    if !(opts.min_step > 0.0) || opts.max_step.is_some_and(|m| !(m > 0.0)) {
        return Err(Error::InvalidSpec(format!(
            "min_step and max_step must be positive, got {} and {:?}",
            opts.min_step, opts.max_step
        )));
    }
    motion.boundary_target(mesh, 0.0)?;
    let mut current = mesh.clone();
    let mut ws = WeightSystem::build(&current, scheme)?;
    let mut fac = ws.factor()?;
    let mut n_fac = 1;
    let mut t = 0.0;
    let mut steps = Vec::new();
    // increments within this of the remainder finish the motion
    let snap = 1e-12;
    'outer: while t < 1.0 {
        let remaining = 1.0 - t;
        let mut inc = match opts.mode {
            StepMode::Variable => opts.max_step.map_or(remaining, |m| m.min(remaining)),
            StepMode::Constant => opts.min_step.min(remaining),
        };
        loop {
            let t_end = if t + inc >= 1.0 - snap { 1.0 } else { t + inc };
            let trial = place(&current, &ws, &fac, &motion.boundary_target(mesh, t_end)?)?;
            let reversals = trial.count_reversals().count();
            // a positive but near-zero element would stop the weight rebuild
            let accepted = reversals == 0 && !has_unusable_element(&trial);
            steps.push(StepRecord {
                t_start: t,
                t_end,
                accepted,
                reversals,
            });
            if accepted {
                log::debug!("accepted step {t:.6} -> {t_end:.6}");
                t = t_end;
                current = trial;
                break;
            }
            inc *= 0.5;
            if opts.mode == StepMode::Constant || inc < opts.min_step * (1.0 - 1e-12) {
                break 'outer;
            }
        }
        if t < 1.0 {
            ws = WeightSystem::build(&current, scheme)?;
            fac = ws.refactor(&fac)?;
            n_fac += 1;
        }
    }
    let mut report = WarpReport::finish(&current, steps, n_fac, t);
    if t < 1.0 {
        report.outcome = Outcome::Reversed;
    }
    Ok((current, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrajectoryOptions {
    /// Use small-step warping between consecutive frames.
    pub small_step: Option<SmallStepOptions>,
    /// Keep going after a frame ends with reversals.
    pub continue_on_reversal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// One mesh per frame attempted.
    pub meshes: Vec<Mesh>,
    pub reports: Vec<WarpReport>,
    /// First frame (0-based) that ended with reversals.
    pub failed_frame: Option<usize>,
}

/// Warps frame to frame: each step starts from the previous frame's mesh
/// and rebuilds weights from it. `frames` are full coordinate arrays of
/// which only boundary rows are read.
pub fn warp_trajectory(
    mesh: &Mesh,
    scheme: Scheme,
    frames: &[Vec<f64>],
    opts: TrajectoryOptions,
) -> Result<Trajectory> {
    let mut current = mesh.clone();
    let mut out = Trajectory {
        meshes: Vec::with_capacity(frames.len()),
        reports: Vec::with_capacity(frames.len()),
        failed_frame: None,
    };
    for (k, frame) in frames.iter().enumerate() {
        let motion = BoundaryMotion::Tabulated {
            frames: vec![frame.clone()],
        };
        let (next, report) = match opts.small_step {
            Some(ss) => small_step_femwarp(&current, scheme, &motion, ss)?,
            None => femwarp(&current, scheme, &motion)?,
        };
        let failed = !report.is_success();
        log::info!("frame {k}: {}", report.outcome);
        out.meshes.push(next.clone());
        out.reports.push(report);
        if failed {
            out.failed_frame.get_or_insert(k);
            if !opts.continue_on_reversal {
                break;
            }
        }
        current = next;
    }
    Ok(out)
}
