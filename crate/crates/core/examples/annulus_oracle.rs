//! Closed-form harmonic map of the annulus and the triangle-wise reversal
//! bound.
//!
//! Prints the map's coefficients for a few rotations, then checks every
//! triangle of a mesh against the sufficient condition
//! `σ_min(∇f) / M > 2 h asp(T)` and compares with what actually happens to
//! the mapped triangle.

use femwarp::analytic::{
    annulus_coeffs, annulus_min_jac_det, check_map_on_triangle, map_triangle, type1_predicate, AnnulusSpec,
    InfinitesimalRotation,
};
use femwarp::generators::gen_annulus;

fn main() -> femwarp::Result<()> {
    println!("{:>6} {:>11} {:>11} {:>11} {:>11} {:>8}", "deg", "a", "b", "c", "d", "folds");
    for deg in [10.0, 30.0, 51.0, 52.0, 90.0] {
        let spec = AnnulusSpec::new(0.5, 0.5, f64::to_radians(deg))?;
        let k = annulus_coeffs(&spec)?;
        println!(
            "{deg:>6} {:>11.6} {:>11.6} {:>11.6} {:>11.6} {:>8}",
            k.a,
            k.b,
            k.c,
            k.d,
            type1_predicate(&spec)
        );
    }
    let spec = AnnulusSpec::new(0.5, 0.5, 1.2)?;
    println!("\nmin Jacobian determinant at 1.2 rad: {:.4}", annulus_min_jac_det(&spec)?);

    let mesh = gen_annulus(0.5, 10, 64)?;
    for theta in [0.5, 2.0, 6.0] {
        let map = InfinitesimalRotation { r: 0.5, theta };
        let (mut safe, mut reversed, mut unsound) = (0, 0, 0);
        for e in 0..mesh.n_elements() {
            let t = mesh.simplex(e);
            let certified = check_map_on_triangle(&map, &t)?.safe();
            let flipped = map_triangle(&map, &t).signed_measure() <= 0.0;
            safe += usize::from(certified);
            reversed += usize::from(flipped);
            unsound += usize::from(certified && flipped);
        }
        println!(
            "infinitesimal rotation {theta}: {safe}/{} certified, {reversed} reversed, {unsound} contradictions",
            mesh.n_elements()
        );
    }
    Ok(())
}
