//! Simplicial meshes in two and three dimensions.
//!
//! A [`Mesh`] stores node coordinates, simplex connectivity and a boundary
//! marker per node. Connectivity is fixed for the life of a mesh; warping
//! produces new meshes through [`Mesh::with_coords`].

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::quality::QualityReport;

/// Up to four points of a triangle or tetrahedron, padded with zeros.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simplex {
    dim: usize,
    pts: [[f64; 3]; 4],
}

impl Simplex {
    /// Builds a simplex from `d + 1` points of dimension `d` (2 or 3).
    pub fn from_points(points: &[&[f64]]) -> Result<Self> {
        let dim = points.len().saturating_sub(1);
        if !(2..=3).contains(&dim) {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: points.len(),
            });
        }
        let mut pts = [[0.0; 3]; 4];
        for (slot, p) in pts.iter_mut().zip(points) {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            slot[..dim].copy_from_slice(p);
        }
        Ok(Simplex { dim, pts })
    }

    pub fn triangle(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Self {
        let lift = |p: [f64; 2]| [p[0], p[1], 0.0];
        Simplex {
            dim: 2,
            pts: [lift(a), lift(b), lift(c), [0.0; 3]],
        }
    }

    pub fn tetrahedron(a: [f64; 3], b: [f64; 3], c: [f64; 3], d: [f64; 3]) -> Self {
        Simplex {
            dim: 3,
            pts: [a, b, c, d],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_vertices(&self) -> usize {
        self.dim + 1
    }

    /// Vertex `k` as a 3-vector (z = 0 in 2D).
    pub fn vertex(&self, k: usize) -> [f64; 3] {
        self.pts[k]
    }

    /// Column `k - 1` of the edge matrix: `v_k - v_0`.
    pub fn edge(&self, k: usize) -> [f64; 3] {
        sub(self.pts[k], self.pts[0])
    }

    /// Signed area (2D) or volume (3D). Positive for counter-clockwise
    /// triangles and right-handed tetrahedra.
    pub fn signed_measure(&self) -> f64 {
        let e1 = self.edge(1);
        let e2 = self.edge(2);
        match self.dim {
            2 => 0.5 * (e1[0] * e2[1] - e1[1] * e2[0]),
            _ => det3(e1, e2, self.edge(3)) / 6.0,
        }
    }

    /// Longest edge length.
    pub fn max_edge(&self) -> f64 {
        let n = self.n_vertices();
        let mut h: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                h = h.max(norm(sub(self.pts[i], self.pts[j])));
            }
        }
        h
    }

    /// Swaps the first two vertices, reversing orientation.
    pub fn flipped(&self) -> Self {
        let mut s = *self;
        s.pts.swap(0, 1);
        s
    }
}

/// Signed area (2D) or volume (3D) of the simplex spanned by `points`.
///
/// Degenerate inputs return 0.
pub fn signed_measure(points: &[&[f64]]) -> Result<f64> {
    Ok(Simplex::from_points(points)?.signed_measure())
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    dot(a, cross(b, c))
}

/// What kind of invariant a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    /// An element cites a node id outside `0..n_nodes`.
    BadIndex,
    /// An element repeats a node id.
    DegenerateElement,
    /// A node belongs to no element.
    OrphanNode,
    /// An element has signed measure `<= 0`.
    ReversedElement,
}

impl ViolationKind {
    pub fn code(&self) -> &'static str {
        match self {
            ViolationKind::BadIndex => "BAD_INDEX",
            ViolationKind::DegenerateElement => "DEGENERATE_ELEMENT",
            ViolationKind::OrphanNode => "ORPHAN_NODE",
            ViolationKind::ReversedElement => "REVERSED_ELEMENT",
        }
    }

    /// Structural violations make a mesh unusable; reversals do not.
    pub fn is_structural(&self) -> bool {
        !matches!(self, ViolationKind::ReversedElement)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Violation {
    pub kind: ViolationKind,
    pub element: Option<usize>,
    pub node: Option<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.code())?;
        if let Some(e) = self.element {
            write!(f, " element={e}")?;
        }
        if let Some(n) = self.node {
            write!(f, " node={n}")?;
        }
        Ok(())
    }
}

/// Element ids whose signed measure is `<= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Reversals {
    pub elements: Vec<usize>,
}

impl Reversals {
    pub fn count(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// A triangle or tetrahedral mesh with boundary-node markers.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    dim: usize,
    coords: Vec<f64>,
    elements: Vec<usize>,
    boundary: Vec<bool>,
}

impl Mesh {
    /// Builds a mesh from flat coordinate and connectivity arrays.
    ///
    /// `coords` holds `dim` values per node, `elements` holds `dim + 1` node
    /// ids per element. Structural violations (bad indices, repeated ids,
    /// nodes that belong to no element) are rejected; reversed elements are
    /// allowed so that warp results can be represented.
    pub fn new(dim: usize, coords: Vec<f64>, elements: Vec<usize>, boundary: Vec<bool>) -> Result<Self> {
        let mesh = Self::new_unchecked(dim, coords, elements, boundary)?;
        let structural: Vec<Violation> = mesh
            .validate()
            .into_iter()
            .filter(|v| v.kind.is_structural())
            .collect();
        match structural.first() {
            None => Ok(mesh),
            Some(v) => Err(match (v.kind, v.element, v.node) {
                (ViolationKind::BadIndex, Some(element), Some(node)) => Error::BadIndex {
                    element,
                    node,
                    n_nodes: mesh.n_nodes(),
                },
                (ViolationKind::DegenerateElement, Some(element), _) => {
                    Error::DegenerateElement { element }
                }
                _ => Error::InvalidMesh(
                    structural
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join("; "),
                ),
            }),
        }
    }

    /// Builds a mesh checking only array shapes. Use [`Mesh::validate`] to
    /// inspect the result.
    pub fn new_unchecked(
        dim: usize,
        coords: Vec<f64>,
        elements: Vec<usize>,
        boundary: Vec<bool>,
    ) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidMesh(format!("unsupported dimension {dim}")));
        }
        if coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: coords.len() % dim,
            });
        }
        if elements.len() % (dim + 1) != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim + 1,
                got: elements.len() % (dim + 1),
            });
        }
        let n = coords.len() / dim;
        if boundary.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: boundary.len(),
            });
        }
        Ok(Mesh {
            dim,
            coords,
            elements,
            boundary,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_nodes(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len() / (self.dim + 1)
    }

    pub fn nodes_per_element(&self) -> usize {
        self.dim + 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn connectivity(&self) -> &[usize] {
        &self.elements
    }

    pub fn boundary_markers(&self) -> &[bool] {
        &self.boundary
    }

    pub fn point(&self, node: usize) -> &[f64] {
        &self.coords[node * self.dim..(node + 1) * self.dim]
    }

    pub fn element(&self, e: usize) -> &[usize] {
        let k = self.dim + 1;
        &self.elements[e * k..(e + 1) * k]
    }

    pub fn elements(&self) -> impl Iterator<Item = &[usize]> {
        self.elements.chunks_exact(self.dim + 1)
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary[node]
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&i| self.boundary[i]).collect()
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&i| !self.boundary[i]).collect()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary.iter().filter(|&&b| b).count()
    }

    pub fn n_interior(&self) -> usize {
        self.n_nodes() - self.n_boundary()
    }

    /// Coordinate `axis` of every node.
    pub fn axis(&self, axis: usize) -> Vec<f64> {
        self.coords.iter().skip(axis).step_by(self.dim).copied().collect()
    }

    /// The simplex of element `e`, vertices in stored order.
    pub fn simplex(&self, e: usize) -> Simplex {
        let mut pts = [[0.0; 3]; 4];
        for (slot, &v) in pts.iter_mut().zip(self.element(e)) {
            slot[..self.dim].copy_from_slice(self.point(v));
        }
        Simplex { dim: self.dim, pts }
    }

    pub fn signed_measure(&self, e: usize) -> f64 {
        self.simplex(e).signed_measure()
    }

    /// Same connectivity and markers, new coordinates.
    pub fn with_coords(&self, coords: Vec<f64>) -> Result<Mesh> {
        if coords.len() != self.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coords.len(),
                got: coords.len(),
            });
        }
        Ok(Mesh {
            dim: self.dim,
            coords,
            elements: self.elements.clone(),
            boundary: self.boundary.clone(),
        })
    }

    /// Same geometry, new boundary markers.
    pub fn with_boundary(&self, boundary: Vec<bool>) -> Result<Mesh> {
        Mesh::new(self.dim, self.coords.clone(), self.elements.clone(), boundary)
    }

    /// Flips every element with negative signed measure so that all are
    /// positively oriented. Returns the number flipped.
    pub fn reorient(&mut self) -> usize {
        let k = self.dim + 1;
        let mut flipped = 0;
        for e in 0..self.n_elements() {
            if self.signed_measure(e) < 0.0 {
                self.elements.swap(e * k, e * k + 1);
                flipped += 1;
            }
        }
        flipped
    }

    /// Sorted neighbor lists: nodes sharing an element with each node.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![BTreeSet::new(); self.n_nodes()];
        for el in self.elements() {
            for &a in el {
                for &b in el {
                    if a != b {
                        sets[a].insert(b);
                    }
                }
            }
        }
        sets.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Element ids incident to each node, ascending.
    pub fn node_elements(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n_nodes()];
        for (e, el) in self.elements().enumerate() {
            for &v in el {
                inc[v].push(e);
            }
        }
        inc
    }

    /// Elements with signed measure `<= 0`.
    pub fn count_reversals(&self) -> Reversals {
        Reversals {
            elements: (0..self.n_elements())
                .filter(|&e| self.signed_measure(e) <= 0.0)
                .collect(),
        }
    }

    pub fn min_signed_measure(&self) -> f64 {
        (0..self.n_elements())
            .map(|e| self.signed_measure(e))
            .fold(f64::INFINITY, f64::min)
    }

    /// Longest edge over all elements.
    pub fn max_edge_length(&self) -> f64 {
        (0..self.n_elements())
            .map(|e| self.simplex(e).max_edge())
            .fold(0.0, f64::max)
    }

    /// Diameter of the coordinate bounding box.
    pub fn bbox_diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in self.coords.chunks_exact(self.dim) {
            for (k, &c) in p.iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        (0..self.dim)
            .map(|k| (hi[k] - lo[k]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Every invariant violation, in element order then node order.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.n_nodes();
        let mut out = Vec::new();
        let mut used = vec![false; n];
        for (e, el) in self.elements().enumerate() {
            let mut structural = false;
            for &v in el {
                if v >= n {
                    out.push(Violation {
                        kind: ViolationKind::BadIndex,
                        element: Some(e),
                        node: Some(v),
                    });
                    structural = true;
                } else {
                    used[v] = true;
                }
            }
            for i in 0..el.len() {
                if el[i + 1..].contains(&el[i]) {
                    out.push(Violation {
                        kind: ViolationKind::DegenerateElement,
                        element: Some(e),
                        node: Some(el[i]),
                    });
                    structural = true;
                    break;
                }
            }
            if !structural && self.signed_measure(e) <= 0.0 {
                out.push(Violation {
                    kind: ViolationKind::ReversedElement,
                    element: Some(e),
                    node: None,
                });
            }
        }
        for (node, &u) in used.iter().enumerate() {
            if !u {
                out.push(Violation {
                    kind: ViolationKind::OrphanNode,
                    element: None,
                    node: Some(node),
                });
            }
        }
        out
    }

    /// True iff [`Mesh::validate`] reports nothing.
    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn quality(&self) -> QualityReport {
        QualityReport::of(self)
    }

    /// Marks as boundary every node on a facet (edge in 2D, face in 3D)
    /// that belongs to exactly one element.
    pub fn infer_boundary(&self) -> Vec<bool> {
        use std::collections::HashMap;
        let k = self.dim + 1;
        let mut count: HashMap<Vec<usize>, usize> = HashMap::new();
        for el in self.elements() {
            for skip in 0..k {
                let mut facet: Vec<usize> = (0..k).filter(|&i| i != skip).map(|i| el[i]).collect();
                facet.sort_unstable();
                *count.entry(facet).or_insert(0) += 1;
            }
        }
        let mut boundary = vec![false; self.n_nodes()];
        for (facet, c) in count {
            if c == 1 {
                for v in facet {
                    boundary[v] = true;
                }
            }
        }
        boundary
    }
}
