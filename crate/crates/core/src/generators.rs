//! Structured annulus and rectangle meshes for tests and demos.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// How each quadrilateral cell of a structured grid is cut in two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Diagonals {
    /// Alternate the cut direction in a checkerboard pattern.
    #[default]
    Alternating,
    /// Cut every cell along the same diagonal.
    Uniform,
}

/// Annulus with inner radius `r` and outer radius 1.
///
/// Rings sit at radii evenly spaced over `[r, 1]`, each with `n_sectors`
/// nodes; the innermost and outermost rings are boundary.
pub fn gen_annulus(r: f64, n_rings: usize, n_sectors: usize) -> Result<Mesh> {
    gen_annulus_with(r, n_rings, n_sectors, Diagonals::default())
}

pub fn gen_annulus_with(r: f64, n_rings: usize, n_sectors: usize, diagonals: Diagonals) -> Result<Mesh> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidSpec(format!("inner radius {r} not in (0, 1)")));
    }
    if n_rings < 2 || n_sectors < 8 {
        return Err(Error::InvalidSpec(format!(
            "annulus needs n_rings >= 2 and n_sectors >= 8, got {n_rings} x {n_sectors}"
        )));
    }
    let mut coords = Vec::with_capacity(2 * n_rings * n_sectors);
    let mut boundary = Vec::with_capacity(n_rings * n_sectors);
    for k in 0..n_rings {
        let rho = r + (1.0 - r) * k as f64 / (n_rings - 1) as f64;
        for j in 0..n_sectors {
            let phi = 2.0 * PI * j as f64 / n_sectors as f64;
            coords.push(rho * phi.cos());
            coords.push(rho * phi.sin());
            boundary.push(k == 0 || k == n_rings - 1);
        }
    }
    let id = |k: usize, j: usize| k * n_sectors + j % n_sectors;
    let mut elements = Vec::with_capacity(6 * (n_rings - 1) * n_sectors);
    for k in 0..n_rings - 1 {
        for j in 0..n_sectors {
            // counter-clockwise in the (rho, phi) plane, which maps to
            // counter-clockwise in the plane
            let (a, b, c, d) = (id(k, j), id(k, j + 1), id(k + 1, j + 1), id(k + 1, j));
            let cut_ac = match diagonals {
                Diagonals::Uniform => true,
                Diagonals::Alternating => (k + j) % 2 == 0,
            };
            if cut_ac {
                elements.extend_from_slice(&[a, d, c, a, c, b]);
            } else {
                elements.extend_from_slice(&[a, d, b, d, c, b]);
            }
        }
    }
    Mesh::new(2, coords, elements, boundary)
}

/// Annulus whose longest edge is close to `h`: cells are roughly square at
/// the mid radius.
pub fn gen_annulus_for_h(r: f64, h: f64) -> Result<Mesh> {
    let (rings, sectors) = annulus_resolution(r, h);
    gen_annulus(r, rings, sectors)
}

/// `(n_rings, n_sectors)` used by [`gen_annulus_for_h`].
pub fn annulus_resolution(r: f64, h: f64) -> (usize, usize) {
    let mid = 0.5 * (1.0 + r);
    // outer-ring cell diagonal: sqrt(arc² + dr²) with dr = mid * arc
    let arc = h / (1.0 + mid * mid).sqrt();
    let sectors = ((2.0 * PI / arc).ceil() as usize).max(8);
    let dr = mid * 2.0 * PI / sectors as f64;
    let rings = (((1.0 - r) / dr).round() as usize + 1).max(2);
    (rings, sectors)
}

/// `[0, width] × [0, height]` grid with `nx × ny` nodes, every cell cut along
/// its lower-left to upper-right diagonal. Perimeter nodes are boundary.
pub fn gen_rectangle(width: f64, height: f64, nx: usize, ny: usize) -> Result<Mesh> {
    rectangle(width, height, nx, ny, |_, _| (0.0, 0.0))
}

/// Like [`gen_rectangle`] but interior nodes are displaced by up to
/// `jitter` cell widths in each direction (deterministic in `seed`).
///
/// Jitter breaks the vertical alignment of structured grids, which
/// otherwise makes every triangle immune to shears of the form
/// `(x, y) ↦ (x, y + g(x))`.
pub fn gen_rectangle_jittered(
    width: f64,
    height: f64,
    nx: usize,
    ny: usize,
    jitter: f64,
    seed: u64,
) -> Result<Mesh> {
    if !(0.0..0.25).contains(&jitter) {
        return Err(Error::InvalidSpec(format!("jitter {jitter} not in [0, 0.25)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (dx, dy) = (width / (nx.max(2) - 1) as f64, height / (ny.max(2) - 1) as f64);
    rectangle(width, height, nx, ny, |_, _| {
        (
            rng.gen_range(-jitter..=jitter) * dx,
            rng.gen_range(-jitter..=jitter) * dy,
        )
    })
}

fn rectangle(
    width: f64,
    height: f64,
    nx: usize,
    ny: usize,
    mut offset: impl FnMut(usize, usize) -> (f64, f64),
) -> Result<Mesh> {
    if nx < 2 || ny < 2 || !(width > 0.0) || !(height > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "rectangle needs nx, ny >= 2 and positive extent, got {nx} x {ny}, {width} x {height}"
        )));
    }
    let (dx, dy) = (width / (nx - 1) as f64, height / (ny - 1) as f64);
    let mut coords = Vec::with_capacity(2 * nx * ny);
    let mut boundary = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let on_edge = i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
            let (ox, oy) = if on_edge { (0.0, 0.0) } else { offset(i, j) };
            coords.push(i as f64 * dx + ox);
            coords.push(j as f64 * dy + oy);
            boundary.push(on_edge);
        }
    }
    let id = |i: usize, j: usize| j * nx + i;
    let mut elements = Vec::with_capacity(6 * (nx - 1) * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            elements.extend_from_slice(&[a, b, c, a, c, d]);
        }
    }
    let mesh = Mesh::new(2, coords, elements, boundary)?;
    if let Some(&e) = mesh.count_reversals().elements.first() {
        return Err(Error::DegenerateElement { element: e });
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    /// Every interior edge shared by exactly two triangles, boundary edges by one.
    fn assert_conforming(m: &Mesh) {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for el in m.elements() {
            for (a, b) in [(el[0], el[1]), (el[1], el[2]), (el[2], el[0])] {
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        for (&(a, b), &c) in &count {
            assert!(c == 1 || c == 2, "edge ({a},{b}) used {c} times");
            if c == 1 {
                assert!(m.is_boundary(a) && m.is_boundary(b));
            }
        }
    }

    #[test]
    fn two_ring_annulus_is_all_boundary() {
        let m = gen_annulus(0.5, 2, 8).unwrap();
        assert_eq!(m.n_nodes(), 16);
        assert_eq!(m.n_elements(), 16);
        assert_eq!(m.n_interior(), 0);
        assert!(matches!(
            crate::assembly::partition_system(&crate::assembly::assemble_stiffness(&m).unwrap(), &m),
            Err(Error::NoInterior)
        ));
    }

    #[test]
    fn annulus_14_by_64() {
        let m = gen_annulus(0.5, 14, 64).unwrap();
        assert!(m.is_valid());
        let h = m.max_edge_length();
        let expected = (0.5f64 / 13.0).max(2.0 * PI / 64.0);
        assert!((h - expected).abs() <= 0.1 * expected, "h = {h}");
        assert!((h - 0.1).abs() < 0.01);
        assert_conforming(&m);
    }

    #[test]
    fn annulus_parameter_bounds() {
        assert!(gen_annulus(0.5, 1, 16).is_err());
        assert!(gen_annulus(0.5, 4, 7).is_err());
        assert!(gen_annulus(1.0, 4, 16).is_err());
    }

    #[test]
    fn annulus_for_h_hits_target() {
        for h in [0.2, 0.11, 0.06, 0.035] {
            let m = gen_annulus_for_h(0.5, h).unwrap();
            let got = m.max_edge_length();
            assert!((got - h).abs() < 0.15 * h, "target {h}, got {got}");
            assert!(m.is_valid());
        }
    }

    #[test]
    fn uniform_diagonals_are_valid() {
        let m = gen_annulus_with(0.3, 6, 24, Diagonals::Uniform).unwrap();
        assert!(m.is_valid());
        assert_conforming(&m);
    }

    #[test]
    fn rectangle_geometry() {
        let m = gen_rectangle(2.0, 1.0, 21, 11).unwrap();
        assert!((m.max_edge_length() - 0.02f64.sqrt()).abs() < 1e-12);
        assert!(m.is_valid());
        assert!(m.is_boundary(0));
        assert_eq!(m.point(0), &[0.0, 0.0]);
        assert_conforming(&m);
        assert!(gen_rectangle(2.0, 1.0, 1, 5).is_err());
    }

    #[test]
    fn jittered_rectangle_is_deterministic_and_valid() {
        let a = gen_rectangle_jittered(2.0, 1.0, 11, 6, 0.2, 7).unwrap();
        let b = gen_rectangle_jittered(2.0, 1.0, 11, 6, 0.2, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.is_valid());
        assert_conforming(&a);
        assert_ne!(a, gen_rectangle(2.0, 1.0, 11, 6).unwrap());
    }
}
