//! Closed-form maps used as oracles.
//!
//! The annulus `r ≤ ρ ≤ 1` warped by rotating its outer circle by `θ` and
//! moving its inner circle from radius `r` to `s` has the Laplace solution
//! `φ*(x, y) = (A x + B y, −B x + A y)` with `A = a + b/ρ²`, `B = c + d/ρ²`.
//! With this sign convention a positive `θ` turns the outer circle
//! clockwise.

use std::f64::consts::PI;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Simplex};
use crate::quality::{aspect_ratio, OnDegenerate};

const DOMAIN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusSpec {
    pub r: f64,
    pub s: f64,
    pub theta: f64,
}

impl AnnulusSpec {
    pub fn new(r: f64, s: f64, theta: f64) -> Result<AnnulusSpec> {
        let spec = AnnulusSpec { r, s, theta };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r <= self.s && self.s < 1.0) || !self.theta.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "annulus needs 0 < r <= s < 1, got r = {}, s = {}, theta = {}",
                self.r, self.s, self.theta
            )));
        }
        Ok(())
    }

    fn check_point(&self, p: [f64; 2]) -> Result<f64> {
        let rho2 = p[0] * p[0] + p[1] * p[1];
        let rho = rho2.sqrt();
        if rho2 == 0.0 || rho < self.r - DOMAIN_SLACK || rho > 1.0 + DOMAIN_SLACK {
            return Err(Error::DomainError { x: p[0], y: p[1] });
        }
        Ok(rho2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

pub fn annulus_coeffs(spec: &AnnulusSpec) -> Result<AnnulusCoeffs> {
    spec.check()?;
    let AnnulusSpec { r, s, theta } = *spec;
    let k = 1.0 / (1.0 - r * r);
    Ok(AnnulusCoeffs {
        a: (theta.cos() - r * s) * k,
        b: (r * s - r * r * theta.cos()) * k,
        c: theta.sin() * k,
        d: -r * r * theta.sin() * k,
    })
}

pub fn annulus_map(spec: &AnnulusSpec, p: [f64; 2]) -> Result<[f64; 2]> {
    let rho2 = spec.check_point(p)?;
    let k = annulus_coeffs(spec)?;
    let a = k.a + k.b / rho2;
    let b = k.c + k.d / rho2;
    Ok([a * p[0] + b * p[1], -b * p[0] + a * p[1]])
}

/// `det ∇φ* = a² + c² − (b² + d²)/ρ⁴`.
pub fn annulus_jac_det(spec: &AnnulusSpec, p: [f64; 2]) -> Result<f64> {
    let rho2 = spec.check_point(p)?;
    let k = annulus_coeffs(spec)?;
    Ok(k.a * k.a + k.c * k.c - (k.b * k.b + k.d * k.d) / (rho2 * rho2))
}

/// Smallest Jacobian determinant over the annulus, attained on the inner
/// circle.
pub fn annulus_min_jac_det(spec: &AnnulusSpec) -> Result<f64> {
    annulus_jac_det(spec, [spec.r, 0.0])
}

/// True iff the continuum map reverses orientation somewhere:
/// `2 r cos θ − r² s − s < 0`.
pub fn type1_predicate(spec: &AnnulusSpec) -> bool {
    type1_margin(spec) < 0.0
}

/// Left-hand side of the reversal test.
pub fn type1_margin(spec: &AnnulusSpec) -> f64 {
    let AnnulusSpec { r, s, theta } = *spec;
    2.0 * r * theta.cos() - r * r * s - s
}

/// Smallest rotation in `[0, π]` at which the continuum map reverses, or
/// `None` if it never does.
pub fn type1_cutoff(r: f64, s: f64) -> Option<f64> {
    let c = (r * r * s + s) / (2.0 * r);
    (c <= 1.0).then(|| c.max(-1.0).acos())
}

fn rotate(p: [f64; 2], angle: f64) -> [f64; 2] {
    let (sn, cs) = angle.sin_cos();
    [cs * p[0] - sn * p[1], sn * p[0] + cs * p[1]]
}

/// Counter-clockwise rotation angle of the circle of radius `rho`.
pub fn infinitesimal_rotation_angle(r: f64, theta: f64, rho: f64) -> f64 {
    (1.0 - r * r / (rho * rho)) * theta / (1.0 - r * r)
}

/// Rotates the circle of radius `ρ` counter-clockwise by
/// `(1 − r²/ρ²) θ / (1 − r²)`: the inner circle stays put and the outer one
/// turns by `θ`.
pub fn infinitesimal_rotation_map(r: f64, theta: f64, p: [f64; 2]) -> Result<[f64; 2]> {
    let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
    if !(r > 0.0 && r < 1.0) || rho < r - DOMAIN_SLACK || rho > 1.0 + DOMAIN_SLACK {
        return Err(Error::DomainError { x: p[0], y: p[1] });
    }
    Ok(rotate(p, infinitesimal_rotation_angle(r, theta, rho)))
}

/// `(x, y) ↦ (x, y + α x (2 − x))`.
pub fn rectangle_shear_map(alpha: f64, p: [f64; 2]) -> [f64; 2] {
    [p[0], p[1] + alpha * p[0] * (2.0 - p[0])]
}

/// `L p + α (0.1 x y, 0.5 y z, 0.1 x²)` with
/// `L = [[2, −1, 0], [−2, 5, 0], [0, 0, 1]]`.
pub fn paper3d_map(alpha: f64, p: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = p;
    [
        2.0 * x - y + alpha * 0.1 * x * y,
        -2.0 * x + 5.0 * y + alpha * 0.5 * y * z,
        z + alpha * 0.1 * x * x,
    ]
}

/// Moves every node of a 2D mesh, boundary and interior alike, by `map`.
pub fn map_mesh(mesh: &Mesh, map: &impl PlanarMap) -> Result<Mesh> {
    if mesh.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: mesh.dim(),
        });
    }
    let coords = mesh.coords().chunks(2).flat_map(|p| map.eval([p[0], p[1]])).collect();
    mesh.with_coords(coords)
}

/// A twice-differentiable planar map with closed-form derivatives.
pub trait PlanarMap {
    fn eval(&self, p: [f64; 2]) -> [f64; 2];
    fn jacobian(&self, p: [f64; 2]) -> Matrix2<f64>;
    /// `H[k]` is the Hessian of component `k`.
    fn hessians(&self, p: [f64; 2]) -> [Matrix2<f64>; 2];

    /// `sqrt(Σ_k ‖H_k‖₂²)`, which bounds `‖∇²f(p)[u, v]‖ / (‖u‖ ‖v‖)`.
    fn hessian_norm(&self, p: [f64; 2]) -> f64 {
        self.hessians(p)
            .iter()
            .map(|h| {
                let n = h.symmetric_eigenvalues().amax();
                n * n
            })
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine2 {
    pub l: Matrix2<f64>,
    pub v: [f64; 2],
}

impl PlanarMap for Affine2 {
    fn eval(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.l[(0, 0)] * p[0] + self.l[(0, 1)] * p[1] + self.v[0],
            self.l[(1, 0)] * p[0] + self.l[(1, 1)] * p[1] + self.v[1],
        ]
    }

    fn jacobian(&self, _: [f64; 2]) -> Matrix2<f64> {
        self.l
    }

    fn hessians(&self, _: [f64; 2]) -> [Matrix2<f64>; 2] {
        [Matrix2::zeros(); 2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectangleShear {
    pub alpha: f64,
}

impl PlanarMap for RectangleShear {
    fn eval(&self, p: [f64; 2]) -> [f64; 2] {
        rectangle_shear_map(self.alpha, p)
    }

    fn jacobian(&self, p: [f64; 2]) -> Matrix2<f64> {
        Matrix2::new(1.0, 0.0, self.alpha * (2.0 - 2.0 * p[0]), 1.0)
    }

    fn hessians(&self, _: [f64; 2]) -> [Matrix2<f64>; 2] {
        [Matrix2::zeros(), Matrix2::new(-2.0 * self.alpha, 0.0, 0.0, 0.0)]
    }
}

/// The map of [`infinitesimal_rotation_map`]. Points off the annulus are
/// evaluated by the same formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfinitesimalRotation {
    pub r: f64,
    pub theta: f64,
}

impl InfinitesimalRotation {
    fn k(&self) -> f64 {
        self.theta / (1.0 - self.r * self.r)
    }

    /// `∇α = 2 k r² p / ρ⁴`.
    fn grad_angle(&self, p: [f64; 2]) -> [f64; 2] {
        let rho2 = p[0] * p[0] + p[1] * p[1];
        let c = 2.0 * self.k() * self.r * self.r / (rho2 * rho2);
        [c * p[0], c * p[1]]
    }

    fn rotation(&self, p: [f64; 2]) -> Matrix2<f64> {
        let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
        let (sn, cs) = infinitesimal_rotation_angle(self.r, self.theta, rho).sin_cos();
        Matrix2::new(cs, -sn, sn, cs)
    }
}

impl PlanarMap for InfinitesimalRotation {
    fn eval(&self, p: [f64; 2]) -> [f64; 2] {
        let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
        rotate(p, infinitesimal_rotation_angle(self.r, self.theta, rho))
    }

    /// `R(α) (I + J p ∇αᵀ)` with `J` the quarter turn.
    fn jacobian(&self, p: [f64; 2]) -> Matrix2<f64> {
        let g = self.grad_angle(p);
        let q = [-p[1], p[0]];
        let inner = Matrix2::new(1.0 + q[0] * g[0], q[0] * g[1], q[1] * g[0], 1.0 + q[1] * g[1]);
        self.rotation(p) * inner
    }

    /// `∂²f/∂p_j∂p_l = R(α) [ J (e_j + q g_j) g_l + J e_l g_j + q ∂_l g_j ]`
    /// with `q = J p`, `g = ∇α`.
    fn hessians(&self, p: [f64; 2]) -> [Matrix2<f64>; 2] {
        let rot = self.rotation(p);
        let g = self.grad_angle(p);
        let q = [-p[1], p[0]];
        let rho2 = p[0] * p[0] + p[1] * p[1];
        let c = 2.0 * self.k() * self.r * self.r;
        let quarter = |v: [f64; 2]| [-v[1], v[0]];
        let mut out = [Matrix2::zeros(); 2];
        for j in 0..2 {
            for l in 0..2 {
                let mut ej = [0.0; 2];
                ej[j] = 1.0;
                let mut el = [0.0; 2];
                el[l] = 1.0;
                let delta = if j == l { 1.0 } else { 0.0 };
                let dg = c * (delta / (rho2 * rho2) - 4.0 * p[j] * p[l] / (rho2 * rho2 * rho2));
                let t1 = quarter([ej[0] + q[0] * g[j], ej[1] + q[1] * g[j]]);
                let t2 = quarter(el);
                let v = [
                    t1[0] * g[l] + t2[0] * g[j] + q[0] * dg,
                    t1[1] * g[l] + t2[1] * g[j] + q[1] * dg,
                ];
                for (k, h) in out.iter_mut().enumerate() {
                    h[(j, l)] = rot[(k, 0)] * v[0] + rot[(k, 1)] * v[1];
                }
            }
        }
        out
    }
}

/// Smallest singular value of a 2×2 matrix.
pub fn sigma_min(m: &Matrix2<f64>) -> f64 {
    m.singular_values().min()
}

/// The terms of the sufficient condition for a triangle to survive a map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerms {
    pub sigma_min: f64,
    pub m: f64,
    pub h: f64,
    pub aspect_ratio: f64,
}

impl BoundTerms {
    /// `σ_min / M`.
    pub fn ratio(&self) -> f64 {
        self.sigma_min / self.m
    }

    /// `σ_min / M > 2 h asp(T)`.
    pub fn safe(&self) -> bool {
        self.ratio() > 2.0 * self.h * self.aspect_ratio
    }
}

/// Whether the image of `t` under a map with Jacobian `grad_v1` at the
/// first vertex and Hessian bound `m` over `t` is guaranteed not reversed.
pub fn reversal_bound_check(t: &Simplex, grad_v1: &Matrix2<f64>, m: f64) -> Result<bool> {
    Ok(bound_terms(t, grad_v1, m)?.safe())
}

pub fn bound_terms(t: &Simplex, grad_v1: &Matrix2<f64>, m: f64) -> Result<BoundTerms> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidBound(m));
    }
    Ok(BoundTerms {
        sigma_min: sigma_min(grad_v1),
        m,
        h: t.max_edge(),
        aspect_ratio: aspect_ratio(t, OnDegenerate::Error)?,
    })
}

/// Largest Hessian norm over a barycentric sample of `t` (10 steps per
/// edge, 66 points). Floored at `1e-300` so affine maps yield a usable
/// bound.
pub fn sampled_hessian_bound(map: &impl PlanarMap, t: &Simplex) -> f64 {
    const N: usize = 10;
    let mut m: f64 = 1e-300;
    for i in 0..=N {
        for j in 0..=N - i {
            let (b1, b2) = (i as f64 / N as f64, j as f64 / N as f64);
            let b0 = 1.0 - b1 - b2;
            let (v0, v1, v2) = (t.vertex(0), t.vertex(1), t.vertex(2));
            let p = [
                b0 * v0[0] + b1 * v1[0] + b2 * v2[0],
                b0 * v0[1] + b1 * v1[1] + b2 * v2[1],
            ];
            m = m.max(map.hessian_norm(p));
        }
    }
    m
}

/// Applies the bound check to `t` under `map`, with `M` from
/// [`sampled_hessian_bound`].
pub fn check_map_on_triangle(map: &impl PlanarMap, t: &Simplex) -> Result<BoundTerms> {
    let v1 = t.vertex(0);
    bound_terms(t, &map.jacobian([v1[0], v1[1]]), sampled_hessian_bound(map, t))
}

/// Image of a triangle under a planar map.
pub fn map_triangle(map: &impl PlanarMap, t: &Simplex) -> Simplex {
    let img = |k: usize| {
        let v = t.vertex(k);
        map.eval([v[0], v[1]])
    };
    Simplex::triangle(img(0), img(1), img(2))
}

/// Degrees to radians.
pub fn deg(x: f64) -> f64 {
    x * PI / 180.0
}
