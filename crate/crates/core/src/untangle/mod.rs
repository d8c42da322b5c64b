//! Maximin untangling: each interior vertex in turn moves to the position
//! maximizing the smallest signed measure of its incident elements.
//!
//! Every incident measure is affine in the free vertex, so a single move is
//! the linear program `max t` subject to `A_i(x) ≥ t`.

mod lp;

use std::fmt;

use crate::assembly::Scheme;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Simplex};
use crate::warp::{femwarp, BoundaryMotion, Outcome, UntangleSummary, WarpReport};

pub use lp::{LpResult, StandardLp};

/// A free vertex and its incident elements.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSubmesh {
    pub node: usize,
    pub dim: usize,
    pub position: Vec<f64>,
    /// Vertex positions of each incident element, free slot included.
    pub elements: Vec<Vec<[f64; 3]>>,
    /// Which slot of each element holds the free vertex.
    pub free_slot: Vec<usize>,
}

impl LocalSubmesh {
    pub fn from_mesh(mesh: &Mesh, node: usize, incident: &[usize]) -> LocalSubmesh {
        Self::from_coords(mesh, mesh.coords(), node, incident)
    }

    /// Like [`LocalSubmesh::from_mesh`] with positions taken from `coords`
    /// instead of the mesh.
    pub fn from_coords(mesh: &Mesh, coords: &[f64], node: usize, incident: &[usize]) -> LocalSubmesh {
        let d = mesh.dim();
        let point = |v: usize| {
            let mut p = [0.0; 3];
            p[..d].copy_from_slice(&coords[v * d..(v + 1) * d]);
            p
        };
        let mut elements = Vec::with_capacity(incident.len());
        let mut free_slot = Vec::with_capacity(incident.len());
        for &e in incident {
            let el = mesh.element(e);
            elements.push(el.iter().map(|&v| point(v)).collect());
            free_slot.push(el.iter().position(|&v| v == node).expect("incident element"));
        }
        LocalSubmesh {
            node,
            dim: d,
            position: coords[node * d..(node + 1) * d].to_vec(),
            elements,
            free_slot,
        }
    }

    /// Signed measure of incident element `i` with the free vertex at `x`.
    pub fn measure_at(&self, i: usize, x: &[f64]) -> f64 {
        let mut pts = self.elements[i].clone();
        pts[self.free_slot[i]][..self.dim].copy_from_slice(&x[..self.dim]);
        let refs: Vec<&[f64]> = pts.iter().map(|p| &p[..self.dim]).collect();
        Simplex::from_points(&refs).expect("simplex shape").signed_measure()
    }

    /// `min_i A_i(x)`.
    pub fn min_measure_at(&self, x: &[f64]) -> f64 {
        (0..self.elements.len())
            .map(|i| self.measure_at(i, x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Bounding-box diagonal of the non-free vertices.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.neighbor_bbox();
        lo.iter().zip(&hi).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt()
    }

    fn neighbor_bbox(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for (el, &fs) in self.elements.iter().zip(&self.free_slot) {
            for (k, p) in el.iter().enumerate() {
                if k != fs {
                    for a in 0..self.dim {
                        lo[a] = lo[a].min(p[a]);
                        hi[a] = hi[a].max(p[a]);
                    }
                }
            }
        }
        (lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reposition {
    pub position: Vec<f64>,
    pub min_measure: f64,
    /// False when the LP optimum does not beat the current position.
    pub moved: bool,
}

/// Half-width of the search box in cavity diameters.
const BOX: f64 = 10.0;

/// Solves the maximin LP for one vertex. The vertex only moves if that
/// raises its smallest incident measure by more than round-off.
pub fn maximin_reposition(sub: &LocalSubmesh) -> Result<Reposition> {
    let d = sub.dim;
    let n = sub.elements.len();
    let unbounded = Error::Unbounded { node: sub.node };
    if n == 0 {
        return Err(unbounded);
    }
    let current = sub.min_measure_at(&sub.position);
    let diam = sub.diameter();
    if !(diam > 0.0) {
        return Err(unbounded);
    }
    // work in ξ = (x − centroid)/D and measures scaled by D^d
    let (lo, hi) = sub.neighbor_bbox();
    let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let scale = diam.powi(d as i32);
    let to_x = |xi: &[f64]| -> Vec<f64> { (0..d).map(|a| center[a] + diam * xi[a]).collect() };
    let scaled = |i: usize, xi: &[f64]| sub.measure_at(i, &to_x(xi)) / scale;

    // A_i(ξ) = c_i + g_i·ξ, exact for affine functions
    let zero = vec![0.0; d];
    let mut g = vec![vec![0.0; d]; n];
    let mut c = vec![0.0; n];
    for i in 0..n {
        c[i] = scaled(i, &zero);
        for a in 0..d {
            let mut e = zero.clone();
            e[a] = 1.0;
            g[i][a] = scaled(i, &e) - c[i];
        }
    }
    // ξ = −BOX + u with 0 ≤ u ≤ 2·BOX; t = t_low + τ with τ ≥ 0
    let corner = vec![-BOX; d];
    let at_corner: f64 = (0..n)
        .map(|i| c[i] - BOX * g[i].iter().sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let t_low = at_corner.min(current / scale) - 1.0;
    let mut a = Vec::with_capacity(n + d);
    let mut b = Vec::with_capacity(n + d);
    for i in 0..n {
        // τ − g_i·u ≤ c_i + g_i·corner − t_low
        let mut row: Vec<f64> = g[i].iter().map(|v| -v).collect();
        row.push(1.0);
        a.push(row);
        let gc: f64 = g[i].iter().zip(&corner).map(|(p, q)| p * q).sum();
        b.push((c[i] + gc - t_low).max(0.0));
    }
    for k in 0..d {
        let mut row = vec![0.0; d + 1];
        row[k] = 1.0;
        a.push(row);
        b.push(2.0 * BOX);
    }
    let mut obj = vec![0.0; d + 1];
    obj[d] = 1.0;
    let y = match (StandardLp { a, b, c: obj }).solve() {
        LpResult::Optimal { y, .. } => y,
        _ => return Err(unbounded),
    };
    let box_tol = 1e-9;
    if y[..d].iter().any(|&u| u <= box_tol || u >= 2.0 * BOX - box_tol) {
        return Err(unbounded);
    }
    let xi: Vec<f64> = (0..d).map(|k| y[k] - BOX).collect();
    let candidate = to_x(&xi);
    let value = sub.min_measure_at(&candidate);
    if value > current + 1e-12 * scale {
        Ok(Reposition {
            position: candidate,
            min_measure: value,
            moved: true,
        })
    } else {
        Ok(Reposition {
            position: sub.position.clone(),
            min_measure: current,
            moved: false,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UntangleOutcome {
    Success,
    /// A full sweep moved no vertex by more than `1e-12`.
    Stalled,
    MaxSweeps,
}

impl UntangleOutcome {
    pub fn name(&self) -> &'static str {
        match self {
            UntangleOutcome::Success => "SUCCESS",
            UntangleOutcome::Stalled => "STALLED",
            UntangleOutcome::MaxSweeps => "MAX_SWEEPS",
        }
    }
}

impl fmt::Display for UntangleOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Smallest incident measure of a vertex before and after its move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveRecord {
    pub node: usize,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UntangleResult {
    pub mesh: Mesh,
    pub sweeps: usize,
    pub outcome: UntangleOutcome,
    /// One record per LP solved, in order.
    pub moves: Vec<MoveRecord>,
    /// Vertices whose LP hit the search box and were left in place.
    pub unbounded: usize,
}

pub const DEFAULT_MAX_SWEEPS: usize = 50;

/// Sweeps over interior vertices in ascending id order until no element
/// is reversed, a sweep stops moving vertices, or `max_sweeps` is reached.
/// Boundary nodes never move.
pub fn untangle(mesh: &Mesh, max_sweeps: usize) -> UntangleResult {
    let d = mesh.dim();
    let incident = mesh.node_elements();
    let interior = mesh.interior_nodes();
    let mut coords = mesh.coords().to_vec();
    let mut current = mesh.clone();
    let mut moves = Vec::new();
    let mut unbounded = 0;
    let mut sweeps = 0;
    let outcome = loop {
        if current.count_reversals().is_empty() {
            break UntangleOutcome::Success;
        }
        if sweeps >= max_sweeps {
            break UntangleOutcome::MaxSweeps;
        }
        sweeps += 1;
        let mut max_disp: f64 = 0.0;
        for &i in &interior {
            let sub = LocalSubmesh::from_coords(&current, &coords, i, &incident[i]);
            match maximin_reposition(&sub) {
                Ok(rep) => {
                    moves.push(MoveRecord {
                        node: i,
                        before: sub.min_measure_at(&sub.position),
                        after: rep.min_measure,
                    });
                    if rep.moved {
                        let disp = rep
                            .position
                            .iter()
                            .zip(&sub.position)
                            .map(|(a, b)| (a - b).powi(2))
                            .sum::<f64>()
                            .sqrt();
                        max_disp = max_disp.max(disp);
                        coords[i * d..(i + 1) * d].copy_from_slice(&rep.position);
                    }
                }
                Err(_) => unbounded += 1,
            }
        }
        current = current.with_coords(coords.clone()).expect("same shape");
        log::debug!("sweep {sweeps}: max displacement {max_disp:e}");
        if max_disp <= 1e-12 && !current.count_reversals().is_empty() {
            break UntangleOutcome::Stalled;
        }
    };
    UntangleResult {
        mesh: current,
        sweeps,
        outcome,
        moves,
        unbounded,
    }
}

/// Untangles starting from the original interior positions with the
/// boundary already at its target.
pub fn untangle_from_original(mesh: &Mesh, motion: &BoundaryMotion, max_sweeps: usize) -> Result<UntangleResult> {
    let moved = mesh.with_coords(motion.evaluate(mesh, 1.0)?)?;
    Ok(untangle(&moved, max_sweeps))
}

/// One-shot warp, then untangling of its output if it has reversals.
pub fn hybrid_warp(
    mesh: &Mesh,
    scheme: Scheme,
    motion: &BoundaryMotion,
    max_sweeps: usize,
) -> Result<(Mesh, WarpReport)> {
    let (warped, mut report) = femwarp(mesh, scheme, motion)?;
    if report.is_success() {
        return Ok((warped, report));
    }
    let res = untangle(&warped, max_sweeps);
    report.quality = res.mesh.quality();
    report.outcome = if report.quality.reversals == 0 {
        Outcome::Success
    } else {
        Outcome::Reversed
    };
    report.untangle = Some(UntangleSummary {
        outcome: res.outcome,
        sweeps: res.sweeps,
    });
    Ok((res.mesh, report))
}
