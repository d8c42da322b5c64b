//! Weight systems expressing each interior node as an affine combination of
//! its neighbors.
//!
//! Three schemes are provided. [`Scheme::Fem`] uses the piecewise-linear
//! Laplacian stiffness matrix, kept unscaled so the interior block stays
//! symmetric positive definite. [`Scheme::Uniform`] weights every neighbor
//! by `1/|N(i)|`, which is classic Laplacian smoothing. [`Scheme::LogBarrier`]
//! picks the convex weights maximizing `Σ log w_ij` subject to the
//! affine-combination constraints.
//!
//! All schemes produce `[A_I, A_B]` with `A_I x_I + A_B x_B = 0` for every
//! coordinate axis of the mesh they were built from.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3};

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Simplex};
use crate::solve::{self, Factorization, IterOptions, IterOutcome};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scheme {
    #[default]
    Fem,
    Uniform,
    LogBarrier,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Fem, Scheme::Uniform, Scheme::LogBarrier];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Fem => "fem",
            Scheme::Uniform => "uniform",
            Scheme::LogBarrier => "log_barrier",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fem" => Ok(Scheme::Fem),
            "uniform" => Ok(Scheme::Uniform),
            "log_barrier" | "lbwarp" | "log-barrier" => Ok(Scheme::LogBarrier),
            other => Err(Error::InvalidSpec(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Where a mesh node lives in the partitioned system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Interior(usize),
    Boundary(usize),
}

/// The interior rows `[A_I, A_B]` of a weight matrix plus the index maps
/// between mesh numbering and block numbering.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSystem {
    scheme: Scheme,
    dim: usize,
    a_i: CsrMatrix,
    a_b: CsrMatrix,
    interior_ids: Vec<usize>,
    boundary_ids: Vec<usize>,
    slots: Vec<Slot>,
}

fn slots_of(mesh: &Mesh) -> (Vec<usize>, Vec<usize>, Vec<Slot>) {
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    let slots = (0..mesh.n_nodes())
        .map(|i| {
            if mesh.is_boundary(i) {
                boundary.push(i);
                Slot::Boundary(boundary.len() - 1)
            } else {
                interior.push(i);
                Slot::Interior(interior.len() - 1)
            }
        })
        .collect();
    (interior, boundary, slots)
}

impl WeightSystem {
    /// Builds the weight system of `scheme` from the current mesh geometry.
    pub fn build(mesh: &Mesh, scheme: Scheme) -> Result<WeightSystem> {
        match scheme {
            Scheme::Fem => partition_system(&assemble_stiffness(mesh)?, mesh),
            Scheme::Uniform => uniform_weights(mesh),
            Scheme::LogBarrier => log_barrier_weights(mesh),
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Interior block, `m × m`.
    pub fn a_i(&self) -> &CsrMatrix {
        &self.a_i
    }

    /// Interior-to-boundary block, `m × b`.
    pub fn a_b(&self) -> &CsrMatrix {
        &self.a_b
    }

    /// Mesh ids of interior nodes in block order.
    pub fn interior_ids(&self) -> &[usize] {
        &self.interior_ids
    }

    /// Mesh ids of boundary nodes in block order.
    pub fn boundary_ids(&self) -> &[usize] {
        &self.boundary_ids
    }

    pub fn slot(&self, node: usize) -> Slot {
        self.slots[node]
    }

    pub fn n_interior(&self) -> usize {
        self.interior_ids.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary_ids.len()
    }

    /// Per-axis coordinates of the interior nodes of `mesh`.
    pub fn interior_coords(&self, mesh: &Mesh) -> Vec<Vec<f64>> {
        self.gather(mesh, &self.interior_ids)
    }

    /// Per-axis coordinates of the boundary nodes of `mesh`.
    pub fn boundary_coords(&self, mesh: &Mesh) -> Vec<Vec<f64>> {
        self.gather(mesh, &self.boundary_ids)
    }

    fn gather(&self, mesh: &Mesh, ids: &[usize]) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|k| ids.iter().map(|&i| mesh.point(i)[k]).collect())
            .collect()
    }

    /// `−A_B X_B` for per-axis boundary coordinates.
    pub fn rhs(&self, boundary: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        if boundary.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: boundary.len(),
            });
        }
        boundary
            .iter()
            .map(|xb| Ok(self.a_b.mul_vec(xb)?.into_iter().map(|v| -v).collect()))
            .collect()
    }

    /// `max_axis ‖A_I x_I + A_B x_B‖∞` for the coordinates of `mesh`.
    pub fn residual(&self, mesh: &Mesh) -> f64 {
        let xi = self.interior_coords(mesh);
        let xb = self.boundary_coords(mesh);
        xi.iter()
            .zip(&xb)
            .map(|(i, b)| {
                let p = self.a_i.mul_vec(i).expect("block sizes");
                let q = self.a_b.mul_vec(b).expect("block sizes");
                p.iter().zip(&q).fold(0.0f64, |m, (u, v)| m.max((u + v).abs()))
            })
            .fold(0.0, f64::max)
    }

    /// `‖A_I e_I + A_B e_B‖∞`.
    pub fn row_sum_residual(&self) -> f64 {
        (0..self.n_interior())
            .map(|i| {
                let s: f64 = self.a_i.row(i).1.iter().chain(self.a_b.row(i).1).sum();
                s.abs()
            })
            .fold(0.0, f64::max)
    }

    /// Factors `A_I`: Cholesky for the symmetric scheme, LU otherwise.
    pub fn factor(&self) -> Result<Factorization> {
        let f = match self.scheme {
            Scheme::Fem => solve::factor(&self.a_i),
            _ => solve::factor_lu(&self.a_i),
        };
        f.map_err(|e| match e {
            Error::NotPositiveDefinite { row, pivot } => {
                Error::SingularSystem(format!("pivot {pivot:e} at row {row}"))
            }
            other => other,
        })
    }

    /// Refactors `A_I` reusing the ordering of `previous`.
    pub fn refactor(&self, previous: &Factorization) -> Result<Factorization> {
        if !previous.symbolic().matches(&self.a_i) {
            return self.factor();
        }
        previous.refactor(&self.a_i).map_err(|e| match e {
            Error::NotPositiveDefinite { row, pivot } => {
                Error::SingularSystem(format!("pivot {pivot:e} at row {row}"))
            }
            other => other,
        })
    }

    /// Solves for interior coordinates with Gauss-Seidel, starting from
    /// `initial_interior` (per axis).
    pub fn gauss_seidel(
        &self,
        boundary: &[Vec<f64>],
        initial_interior: Vec<Vec<f64>>,
        opts: IterOptions,
    ) -> Result<IterOutcome> {
        let rhs = self.rhs(boundary)?;
        solve::gauss_seidel(&self.a_i, &rhs, initial_interior, opts)
    }
}

/// Relative measure below which an element has no usable stiffness.
pub const DEGENERACY_TOL: f64 = 1e-14;

/// True when `|measure| ≤ DEGENERACY_TOL · h^d`, `h` the longest edge.
pub fn is_degenerate(s: &Simplex) -> bool {
    !(s.signed_measure().abs() > DEGENERACY_TOL * s.max_edge().powi(s.dim() as i32))
}

/// True when some element is reversed or too thin to assemble.
pub fn has_unusable_element(mesh: &Mesh) -> bool {
    (0..mesh.n_elements()).any(|e| {
        let s = mesh.simplex(e);
        s.signed_measure() <= 0.0 || is_degenerate(&s)
    })
}

fn gradients(s: &Simplex, element: usize) -> Result<(f64, Vec<[f64; 3]>)> {
    let measure = s.signed_measure();
    if is_degenerate(s) {
        return Err(Error::DegenerateElement { element });
    }
    let d = s.dim();
    let mut grads = vec![[0.0; 3]; d + 1];
    match d {
        2 => {
            let (e1, e2) = (s.edge(1), s.edge(2));
            let inv = Matrix2::new(e1[0], e2[0], e1[1], e2[1])
                .try_inverse()
                .ok_or(Error::DegenerateElement { element })?;
            for k in 0..2 {
                grads[k + 1] = [inv[(k, 0)], inv[(k, 1)], 0.0];
            }
        }
        _ => {
            let (e1, e2, e3) = (s.edge(1), s.edge(2), s.edge(3));
            let inv = Matrix3::new(e1[0], e2[0], e3[0], e1[1], e2[1], e3[1], e1[2], e2[2], e3[2])
                .try_inverse()
                .ok_or(Error::DegenerateElement { element })?;
            for k in 0..3 {
                grads[k + 1] = [inv[(k, 0)], inv[(k, 1)], inv[(k, 2)]];
            }
        }
    }
    let mut g0 = [0.0; 3];
    for g in &grads[1..] {
        for c in 0..3 {
            g0[c] -= g[c];
        }
    }
    grads[0] = g0;
    Ok((measure.abs(), grads))
}

fn local_matrix(s: &Simplex, element: usize) -> Result<DMatrix<f64>> {
    let (vol, grads) = gradients(s, element)?;
    let n = s.n_vertices();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        vol * (0..3).map(|c| grads[i][c] * grads[j][c]).sum::<f64>()
    }))
}

/// `K[i][j] = ∫_T ∇φ_i · ∇φ_j` for the linear hat functions of one simplex.
pub fn local_stiffness(s: &Simplex) -> Result<DMatrix<f64>> {
    local_matrix(s, 0)
}

/// Global stiffness matrix of the Laplacian, accumulated in ascending
/// element order.
pub fn assemble_stiffness(mesh: &Mesh) -> Result<CsrMatrix> {
    let n = mesh.n_nodes();
    let rows = mesh
        .adjacency()
        .into_iter()
        .enumerate()
        .map(|(i, mut nbrs)| {
            nbrs.push(i);
            nbrs
        })
        .collect();
    let mut a = CsrMatrix::from_pattern(n, n, rows);
    for e in 0..mesh.n_elements() {
        let k = local_matrix(&mesh.simplex(e), e)?;
        let el = mesh.element(e);
        for (li, &gi) in el.iter().enumerate() {
            for (lj, &gj) in el.iter().enumerate() {
                a.add(gi, gj, k[(li, lj)]);
            }
        }
    }
    Ok(a)
}

/// Splits the interior rows of a full weight matrix into `[A_I, A_B]`.
pub fn partition_system(a: &CsrMatrix, mesh: &Mesh) -> Result<WeightSystem> {
    partition(a, mesh, Scheme::Fem)
}

fn partition(a: &CsrMatrix, mesh: &Mesh, scheme: Scheme) -> Result<WeightSystem> {
    let (interior, boundary, slots) = slots_of(mesh);
    if interior.is_empty() {
        return Err(Error::NoInterior);
    }
    if boundary.is_empty() {
        return Err(Error::NoBoundary);
    }
    let int_map: Vec<Option<usize>> = slots
        .iter()
        .map(|s| match s {
            Slot::Interior(k) => Some(*k),
            Slot::Boundary(_) => None,
        })
        .collect();
    let bnd_map: Vec<Option<usize>> = slots
        .iter()
        .map(|s| match s {
            Slot::Boundary(k) => Some(*k),
            Slot::Interior(_) => None,
        })
        .collect();
    Ok(WeightSystem {
        scheme,
        dim: mesh.dim(),
        a_i: a.select(&interior, &int_map, interior.len()),
        a_b: a.select(&interior, &bnd_map, boundary.len()),
        interior_ids: interior,
        boundary_ids: boundary,
        slots,
    })
}

/// Builds `[I − W]` restricted to interior rows from per-node neighbor
/// weights.
fn from_weights(mesh: &Mesh, scheme: Scheme, weights: Vec<(usize, Vec<(usize, f64)>)>) -> Result<WeightSystem> {
    let n = mesh.n_nodes();
    let mut rows = vec![Vec::new(); n];
    for (i, w) in &weights {
        rows[*i] = std::iter::once(*i).chain(w.iter().map(|p| p.0)).collect();
    }
    let mut a = CsrMatrix::from_pattern(n, n, rows);
    for (i, w) in weights {
        a.set(i, i, 1.0);
        for (j, wij) in w {
            a.set(i, j, -wij);
        }
    }
    partition(&a, mesh, scheme)
}

/// Every interior node is the centroid of its neighbors.
pub fn uniform_weights(mesh: &Mesh) -> Result<WeightSystem> {
    let adj = mesh.adjacency();
    let weights = mesh
        .interior_nodes()
        .into_iter()
        .map(|i| {
            let nbrs = &adj[i];
            if nbrs.is_empty() {
                return Err(Error::NoNeighbors { node: i });
            }
            let w = 1.0 / nbrs.len() as f64;
            Ok((i, nbrs.iter().map(|&j| (j, w)).collect()))
        })
        .collect::<Result<Vec<_>>>()?;
    from_weights(mesh, Scheme::Uniform, weights)
}

/// Convex weights maximizing `Σ log w_j` subject to `Σ w_j = 1` and
/// `Σ w_j p_j = x` for every interior node.
pub fn log_barrier_weights(mesh: &Mesh) -> Result<WeightSystem> {
    let adj = mesh.adjacency();
    let weights = mesh
        .interior_nodes()
        .into_iter()
        .map(|i| {
            if adj[i].is_empty() {
                return Err(Error::NoNeighbors { node: i });
            }
            let nbrs: Vec<&[f64]> = adj[i].iter().map(|&j| mesh.point(j)).collect();
            let w = barrier_weights(mesh.point(i), &nbrs)
                .map_err(|_| Error::NodeNotInteriorToNeighbors { node: i })?;
            Ok((i, adj[i].iter().copied().zip(w.weights).collect()))
        })
        .collect::<Result<Vec<_>>>()?;
    from_weights(mesh, Scheme::LogBarrier, weights)
}

/// Solution of one node's barrier program.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierWeights {
    pub weights: Vec<f64>,
    /// `‖C w − c‖∞` on the scale-normalized constraints.
    pub kkt_residual: f64,
    pub newton_iterations: usize,
}

const BARRIER_MAX_ITERS: usize = 100;
const BARRIER_TOL: f64 = 1e-10;
const BARRIER_MIN_WEIGHT: f64 = 1e-9;

/// Damped Newton on the dual of the barrier program, started from uniform
/// weights.
///
/// With constraint vectors `a_j = (1, (p_j − x)/ρ)` the optimal weights are
/// `w_j = 1 / (a_j · λ)` where `λ` minimizes the convex dual
/// `−Σ log(a_j · λ) + λ_0`. Fails when `x` is not strictly inside the convex
/// hull of the `p_j`, in which case the dual is unbounded below.
pub fn barrier_weights(x: &[f64], neighbors: &[&[f64]]) -> Result<BarrierWeights> {
    let n = neighbors.len();
    let d = x.len();
    let infeasible = || Error::NodeNotInteriorToNeighbors { node: 0 };
    if n < d + 1 {
        return Err(infeasible());
    }
    let rho = neighbors
        .iter()
        .map(|p| p.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    if rho == 0.0 {
        return Err(infeasible());
    }
    let rows: Vec<DVector<f64>> = neighbors
        .iter()
        .map(|p| {
            DVector::from_iterator(
                d + 1,
                std::iter::once(1.0).chain(p.iter().zip(x).map(|(a, b)| (a - b) / rho)),
            )
        })
        .collect();
    let mut c = DVector::zeros(d + 1);
    c[0] = 1.0;
    let slacks = |lam: &DVector<f64>| rows.iter().map(|a| a.dot(lam)).collect::<Vec<f64>>();
    let dual = |lam: &DVector<f64>, s: &[f64]| -s.iter().map(|v| v.ln()).sum::<f64>() + lam.dot(&c);

    let gradient = |s: &[f64]| {
        let mut grad = c.clone();
        for (a, &sj) in rows.iter().zip(s) {
            grad -= a * (1.0 / sj);
        }
        grad
    };

    let mut lam = DVector::zeros(d + 1);
    lam[0] = n as f64;
    let mut s = slacks(&lam);
    let mut grad = gradient(&s);
    let mut residual = grad.amax();
    let mut iters = 0;
    while residual > 1e-15 && iters < BARRIER_MAX_ITERS {
        let mut hess = DMatrix::zeros(d + 1, d + 1);
        for (a, &sj) in rows.iter().zip(&s) {
            hess += (a * a.transpose()) * (1.0 / (sj * sj));
        }
        let step = match hess.cholesky() {
            Some(ch) => -ch.solve(&grad),
            None => return Err(infeasible()),
        };
        let g0 = dual(&lam, &s);
        let slope = grad.dot(&step);
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-12 {
            let trial = &lam + &step * t;
            let st = slacks(&trial);
            if st.iter().all(|&v| v > 0.0) {
                let gt = gradient(&st);
                // near the optimum the dual value stops resolving progress,
                // so a shrinking gradient also counts
                if dual(&trial, &st) <= g0 + 1e-4 * t * slope || gt.amax() < 0.5 * residual {
                    lam = trial;
                    s = st;
                    grad = gt;
                    residual = grad.amax();
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        iters += 1;
        if !accepted {
            break;
        }
    }
    let weights: Vec<f64> = s.iter().map(|v| 1.0 / v).collect();
    // on the hull boundary the dual runs off to infinity while its gradient
    // still shrinks; the symptom is a weight collapsing to zero
    if !(residual <= BARRIER_TOL) || weights.iter().any(|&w| !(w > BARRIER_MIN_WEIGHT)) {
        return Err(infeasible());
    }
    Ok(BarrierWeights {
        weights,
        kkt_residual: residual,
        newton_iterations: iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_annulus, gen_rectangle};
    use approx::assert_relative_eq;

    fn unit_right() -> Simplex {
        Simplex::triangle([0.0, 0.0], [1.0, 0.0], [0.0, 1.0])
    }

    /// Cotangent formula: K[i][j] = −cot(θ_k)/2 where θ_k is the angle
    /// opposite edge ij; diagonal entries from zero row sums.
    fn cotangent_oracle(p: [[f64; 2]; 3]) -> [[f64; 3]; 3] {
        let mut k = [[0.0; 3]; 3];
        for o in 0..3 {
            let (i, j) = ((o + 1) % 3, (o + 2) % 3);
            let u = [p[i][0] - p[o][0], p[i][1] - p[o][1]];
            let v = [p[j][0] - p[o][0], p[j][1] - p[o][1]];
            let cot = (u[0] * v[0] + u[1] * v[1]) / (u[0] * v[1] - u[1] * v[0]).abs();
            k[i][j] = -0.5 * cot;
            k[j][i] = -0.5 * cot;
        }
        for i in 0..3 {
            k[i][i] = -(0..3).filter(|&j| j != i).map(|j| k[i][j]).sum::<f64>();
        }
        k
    }

    #[test]
    fn local_stiffness_unit_right_triangle() {
        let k = local_stiffness(&unit_right()).unwrap();
        let expected = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        let oracle = cotangent_oracle([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(k[(i, j)], expected[i][j], epsilon = 1e-15);
                assert_relative_eq!(oracle[i][j], expected[i][j], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn local_stiffness_matches_cotangent_formula() {
        let p = [[0.3, -0.2], [1.7, 0.4], [0.1, 1.3]];
        let k = local_stiffness(&Simplex::triangle(p[0], p[1], p[2])).unwrap();
        let oracle = cotangent_oracle(p);
        for i in 0..3 {
            let row: f64 = (0..3).map(|j| k[(i, j)]).sum();
            assert!(row.abs() < 1e-13);
            for j in 0..3 {
                assert_relative_eq!(k[(i, j)], oracle[i][j], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn local_stiffness_is_scale_invariant_in_2d() {
        let p = [[0.3, -0.2], [1.7, 0.4], [0.1, 1.3]];
        let k = local_stiffness(&Simplex::triangle(p[0], p[1], p[2])).unwrap();
        let c = 7.5;
        let s = |q: [f64; 2]| [q[0] * c, q[1] * c];
        let ks = local_stiffness(&Simplex::triangle(s(p[0]), s(p[1]), s(p[2]))).unwrap();
        for (a, b) in k.iter().zip(ks.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn local_stiffness_tetrahedron_rows_sum_to_zero() {
        let t = Simplex::tetrahedron([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
        let k = local_stiffness(&t).unwrap();
        for i in 0..4 {
            assert!((0..4).map(|j| k[(i, j)]).sum::<f64>().abs() < 1e-15);
        }
        // ∇φ_3 = e_z, volume 1/6
        assert_relative_eq!(k[(3, 3)], 1.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(k[(0, 0)], 3.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_element_is_rejected() {
        let flat = Simplex::triangle([0.0, 0.0], [1.0, 0.0], [2.0, 0.0]);
        assert!(matches!(local_stiffness(&flat), Err(Error::DegenerateElement { .. })));
    }

    #[test]
    fn single_triangle_assembly_equals_local() {
        let m = Mesh::new(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0], vec![0, 1, 2], vec![true; 3]).unwrap();
        let a = assemble_stiffness(&m).unwrap();
        let k = local_stiffness(&unit_right()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a.get(i, j), k[(i, j)]);
            }
        }
    }

    #[test]
    fn unit_square_pattern_follows_adjacency() {
        let m = gen_rectangle(1.0, 1.0, 2, 2).unwrap();
        let a = assemble_stiffness(&m).unwrap();
        assert_eq!(a.nrows(), 4);
        // diagonal 0-3 is shared; 1-2 is not an edge
        assert_eq!(a.nnz(), 14);
        assert_eq!(a.get(1, 2), 0.0);
        assert!(a.row(0).0.contains(&3));
        assert!(!a.row(1).0.contains(&2));
        for i in 0..4 {
            assert!(a.row(i).1.iter().sum::<f64>().abs() < 1e-15);
        }
        assert!(a.is_symmetric(0.0));
    }

    fn centered_square() -> Mesh {
        let coords = vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.5, 0.5];
        let el = vec![0, 1, 4, 1, 2, 4, 2, 3, 4, 3, 0, 4];
        Mesh::new(2, coords, el, vec![true, true, true, true, false]).unwrap()
    }

    #[test]
    fn square_with_center_node() {
        let m = centered_square();
        let ws = partition_system(&assemble_stiffness(&m).unwrap(), &m).unwrap();
        assert_eq!(ws.a_i().nrows(), 1);
        assert!(ws.a_i().get(0, 0) > 0.0);
        assert!(ws.residual(&m) < 1e-15);
        let lb = log_barrier_weights(&m).unwrap();
        for j in 0..4 {
            assert_relative_eq!(-lb.a_b().get(0, j), 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn annulus_fem_identity() {
        let m = gen_annulus(0.5, 14, 64).unwrap();
        let ws = WeightSystem::build(&m, Scheme::Fem).unwrap();
        assert!(ws.a_i().is_symmetric(1e-14));
        assert!(ws.residual(&m) < 1e-10);
        assert!(ws.row_sum_residual() < 1e-10);
        ws.factor().unwrap();
    }

    #[test]
    fn two_interior_components_are_still_spd() {
        // a 3-ring annulus has a single interior ring; cut it into two arcs
        // by marking two of its nodes as boundary
        let m = gen_annulus(0.5, 3, 16).unwrap();
        let mut b = m.boundary_markers().to_vec();
        b[16] = true;
        b[24] = true;
        let m = m.with_boundary(b).unwrap();
        let ws = WeightSystem::build(&m, Scheme::Fem).unwrap();
        assert_eq!(ws.n_interior(), 14);
        assert!(solve::factor(ws.a_i()).is_ok());
    }

    #[test]
    fn uniform_weights_rows() {
        let m = gen_rectangle(1.0, 1.0, 4, 4).unwrap();
        let ws = uniform_weights(&m).unwrap();
        let adj = m.adjacency();
        for (k, &i) in ws.interior_ids().iter().enumerate() {
            let w = 1.0 / adj[i].len() as f64;
            assert_eq!(ws.a_i().get(k, k), 1.0);
            for &j in &adj[i] {
                let v = match ws.slot(j) {
                    Slot::Interior(t) => ws.a_i().get(k, t),
                    Slot::Boundary(t) => ws.a_b().get(k, t),
                };
                assert_eq!(v, -w);
            }
        }
        assert!(ws.row_sum_residual() < 1e-15);
        assert!(ws.residual(&m) < 1e-14);
    }

    #[test]
    fn barrier_weights_examples() {
        let tri: [&[f64]; 3] = [&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]];
        let w = barrier_weights(&[1.0 / 3.0, 1.0 / 3.0], &tri).unwrap();
        for v in &w.weights {
            assert_relative_eq!(*v, 1.0 / 3.0, epsilon = 1e-12);
        }
        // with d + 1 neighbors the equality constraints fix the weights
        let w = barrier_weights(&[0.25, 0.25], &tri).unwrap();
        let oracle = nalgebra::Matrix3::new(1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)
            .lu()
            .solve(&nalgebra::Vector3::new(1.0, 0.25, 0.25))
            .unwrap();
        for k in 0..3 {
            assert_relative_eq!(w.weights[k], oracle[k], epsilon = 1e-12);
        }
        assert_relative_eq!(w.weights[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn barrier_weights_satisfy_kkt_conditions() {
        // hexagon-ish star, off-center node
        let pts: Vec<[f64; 2]> = (0..7)
            .map(|k| {
                let t = k as f64 * 0.9;
                [1.3 * t.cos(), 0.8 * t.sin()]
            })
            .collect();
        let nbrs: Vec<&[f64]> = pts.iter().map(|p| &p[..]).collect();
        let x = [0.2, -0.1];
        let w = barrier_weights(&x, &nbrs).unwrap();
        assert!(w.kkt_residual <= 1e-10);
        let s: f64 = w.weights.iter().sum();
        assert_relative_eq!(s, 1.0, epsilon = 1e-12);
        for c in 0..2 {
            let v: f64 = w.weights.iter().zip(&pts).map(|(w, p)| w * p[c]).sum();
            assert_relative_eq!(v, x[c], epsilon = 1e-12);
        }
        // stationarity: 1/w_j is affine in p_j
        let inv: Vec<f64> = w.weights.iter().map(|v| 1.0 / v).collect();
        let fit = nalgebra::Matrix3::new(
            1.0, pts[0][0], pts[0][1], 1.0, pts[1][0], pts[1][1], 1.0, pts[2][0], pts[2][1],
        )
        .lu()
        .solve(&nalgebra::Vector3::new(inv[0], inv[1], inv[2]))
        .unwrap();
        for (p, &iv) in pts.iter().zip(&inv) {
            assert_relative_eq!(fit[0] + fit[1] * p[0] + fit[2] * p[1], iv, max_relative = 1e-8);
        }
    }

    #[test]
    fn barrier_rejects_points_outside_the_hull() {
        let tri: [&[f64]; 3] = [&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]];
        assert!(barrier_weights(&[0.8, 0.8], &tri).is_err());
        assert!(barrier_weights(&[0.5, 0.0], &tri).is_err());
    }

    #[test]
    fn log_barrier_reports_offending_node() {
        let m = centered_square();
        let moved = m
            .with_coords(vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.5, 0.5])
            .unwrap();
        assert!(matches!(
            log_barrier_weights(&moved),
            Err(Error::NodeNotInteriorToNeighbors { node: 4 })
        ));
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("elastic".parse::<Scheme>().is_err());
    }
}
