//! Element shape metrics and per-mesh quality summaries.

use std::fmt;

use nalgebra::{Matrix2, Matrix3};

use crate::error::{Error, Result};
use crate::mesh::{cross, norm, sub, Mesh, Simplex};

/// How [`aspect_ratio`] treats an element with zero measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OnDegenerate {
    /// Return `f64::INFINITY`.
    #[default]
    Infinite,
    /// Return [`Error::DegenerateElement`].
    Error,
}

/// Longest edge divided by the smallest altitude. Orientation is ignored.
pub fn aspect_ratio(s: &Simplex, on_degenerate: OnDegenerate) -> Result<f64> {
    let measure = s.signed_measure().abs();
    let h = s.max_edge();
    if measure == 0.0 || h == 0.0 {
        return match on_degenerate {
            OnDegenerate::Infinite => Ok(f64::INFINITY),
            OnDegenerate::Error => Err(Error::DegenerateElement { element: 0 }),
        };
    }
    let min_altitude = match s.dim() {
        // the shortest altitude drops onto the longest edge
        2 => 2.0 * measure / h,
        _ => {
            let v = |k| s.vertex(k);
            let faces = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];
            let max_face = faces
                .iter()
                .map(|f| 0.5 * norm(cross(sub(v(f[1]), v(f[0])), sub(v(f[2]), v(f[0])))))
                .fold(0.0, f64::max);
            3.0 * measure / max_face
        }
    };
    Ok(h / min_altitude)
}

/// Edge matrix of the unit-edge equilateral triangle / regular tetrahedron.
fn reference_2d() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.5, 0.0, 3f64.sqrt() / 2.0)
}

fn reference_3d() -> Matrix3<f64> {
    Matrix3::new(
        1.0,
        0.5,
        0.5,
        0.0,
        3f64.sqrt() / 2.0,
        3f64.sqrt() / 6.0,
        0.0,
        0.0,
        (2.0f64 / 3.0).sqrt(),
    )
}

/// `‖W‖²_F / (d · det(W)^(2/d))` with `W` mapping the regular unit simplex
/// onto the element. Equals 1 for the regular simplex and grows with
/// distortion.
pub fn inverse_mean_ratio(s: &Simplex) -> Result<f64> {
    let measure = s.signed_measure();
    if measure <= 0.0 {
        return Err(Error::ReversedElement { measure });
    }
    let (frob2, det, d) = match s.dim() {
        2 => {
            let (e1, e2) = (s.edge(1), s.edge(2));
            let e = Matrix2::new(e1[0], e2[0], e1[1], e2[1]);
            let w = e * reference_2d().try_inverse().expect("reference simplex");
            (w.norm_squared(), w.determinant(), 2.0)
        }
        _ => {
            let (e1, e2, e3) = (s.edge(1), s.edge(2), s.edge(3));
            let e = Matrix3::new(e1[0], e2[0], e3[0], e1[1], e2[1], e3[1], e1[2], e2[2], e3[2]);
            let w = e * reference_3d().try_inverse().expect("reference simplex");
            (w.norm_squared(), w.determinant(), 3.0)
        }
    };
    Ok(frob2 / (d * det.powf(2.0 / d)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Stats {
    fn of(values: impl Iterator<Item = f64>) -> Option<Stats> {
        let (mut min, mut max, mut sum, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for v in values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
            n += 1;
        }
        (n > 0).then(|| Stats {
            min,
            max,
            mean: sum / n as f64,
        })
    }
}

/// Summary statistics of a mesh.
///
/// Inverse mean ratio is only defined for positively oriented elements, so
/// its statistics cover those alone; aspect ratio covers every element with
/// nonzero measure.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub n_elements: usize,
    pub reversals: usize,
    /// Positive elements with measure below `1e-12 · h^d`.
    pub near_degenerate: usize,
    pub signed_measure: Stats,
    pub aspect_ratio: Option<Stats>,
    pub inverse_mean_ratio: Option<Stats>,
    /// Longest edge in the mesh.
    pub h: f64,
}

impl QualityReport {
    pub fn of(mesh: &Mesh) -> QualityReport {
        let h = mesh.max_edge_length();
        let simplices: Vec<Simplex> = (0..mesh.n_elements()).map(|e| mesh.simplex(e)).collect();
        let measures: Vec<f64> = simplices.iter().map(Simplex::signed_measure).collect();
        let floor = 1e-12 * h.powi(mesh.dim() as i32);
        QualityReport {
            n_elements: mesh.n_elements(),
            reversals: measures.iter().filter(|&&m| m <= 0.0).count(),
            near_degenerate: measures.iter().filter(|&&m| m > 0.0 && m < floor).count(),
            signed_measure: Stats::of(measures.iter().copied()).unwrap_or(Stats {
                min: 0.0,
                max: 0.0,
                mean: 0.0,
            }),
            aspect_ratio: Stats::of(
                simplices
                    .iter()
                    .filter_map(|s| aspect_ratio(s, OnDegenerate::Error).ok()),
            ),
            inverse_mean_ratio: Stats::of(simplices.iter().filter_map(|s| inverse_mean_ratio(s).ok())),
            h,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.reversals == 0
    }
}

fn fmt_stats(f: &mut fmt::Formatter<'_>, name: &str, s: Option<&Stats>) -> fmt::Result {
    match s {
        Some(s) => {
            writeln!(f, "{name}_min = {:e}", s.min)?;
            writeln!(f, "{name}_max = {:e}", s.max)?;
            writeln!(f, "{name}_mean = {:e}", s.mean)
        }
        None => {
            writeln!(f, "{name}_min = nan")?;
            writeln!(f, "{name}_max = nan")?;
            writeln!(f, "{name}_mean = nan")
        }
    }
}

/// Flat `key = value` lines in a fixed order.
impl fmt::Display for QualityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n_elements = {}", self.n_elements)?;
        writeln!(f, "reversals = {}", self.reversals)?;
        writeln!(f, "near_degenerate = {}", self.near_degenerate)?;
        writeln!(f, "h = {:e}", self.h)?;
        fmt_stats(f, "signed_measure", Some(&self.signed_measure))?;
        fmt_stats(f, "aspect_ratio", self.aspect_ratio.as_ref())?;
        fmt_stats(f, "inverse_mean_ratio", self.inverse_mean_ratio.as_ref())
    }
}
