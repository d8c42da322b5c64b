//! Quality statistics of generated meshes, and how they degrade as a
//! rectangle is sheared.

use femwarp::analytic::{map_mesh, RectangleShear};
use femwarp::generators::{gen_annulus, gen_rectangle_jittered};

fn main() -> femwarp::Result<()> {
    let annulus = gen_annulus(0.4, 6, 40)?;
    println!("annulus\n{}", annulus.quality());

    let rect = gen_rectangle_jittered(2.0, 1.0, 21, 11, 0.1, 1)?;
    for alpha in [0.0, 2.0, 8.0, 20.0] {
        let sheared = map_mesh(&rect, &RectangleShear { alpha })?;
        let q = sheared.quality();
        let imr = q.inverse_mean_ratio.map_or(f64::NAN, |s| s.max);
        println!("shear {alpha:>5}: reversals {:>3}, worst inverse mean ratio {imr:.3}", q.reversals);
    }
    Ok(())
}
