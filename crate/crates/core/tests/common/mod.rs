#![allow(dead_code)]

use std::path::PathBuf;

use femwarp::io::read_mesh_base;
use femwarp::Mesh;
use rand::Rng;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data")
}

/// Jittered Kuhn-split cube on `[-1, 1]^3` read from the Triangle/TetGen
/// fixture files.
pub fn cube() -> Mesh {
    read_mesh_base(&data_dir().join("cube")).expect("cube fixture")
}

/// Random `d × d` matrix (row-major) with entries in `[-2, 2]` and
/// `|det| ≥ 0.2`, plus a random translation.
pub fn random_affine(rng: &mut impl Rng, d: usize) -> (Vec<f64>, Vec<f64>) {
    loop {
        let l: Vec<f64> = (0..d * d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let det = if d == 2 {
            l[0] * l[3] - l[1] * l[2]
        } else {
            l[0] * (l[4] * l[8] - l[5] * l[7]) - l[1] * (l[3] * l[8] - l[5] * l[6])
                + l[2] * (l[3] * l[7] - l[4] * l[6])
        };
        if det.abs() >= 0.2 {
            let v = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
            return (l, v);
        }
    }
}

/// `L p + v` for every node.
pub fn apply_affine(mesh: &Mesh, l: &[f64], v: &[f64]) -> Vec<f64> {
    let d = mesh.dim();
    mesh.coords()
        .chunks(d)
        .flat_map(|p| (0..d).map(move |i| (0..d).map(|j| l[i * d + j] * p[j]).sum::<f64>() + v[i]))
        .collect()
}

/// Row-sum (infinity) norm of a row-major square matrix.
pub fn matrix_norm_inf(l: &[f64], d: usize) -> f64 {
    (0..d)
        .map(|i| (0..d).map(|j| l[i * d + j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}
