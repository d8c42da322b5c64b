//! One-shot warping of an annulus whose outer circle is turned clockwise.
//!
//! Runs the three weight schemes at a few angles and prints how many
//! elements come out reversed, next to the angle at which the continuum
//! harmonic map itself stops being orientation preserving.
//!
//! ```text
//! cargo run --example annulus_warp
//! ```

use femwarp::analytic::type1_cutoff;
use femwarp::assembly::Scheme;
use femwarp::generators::gen_annulus_for_h;
use femwarp::warp::{femwarp, BoundaryMotion};

fn main() -> femwarp::Result<()> {
    let r = 0.5;
    let mesh = gen_annulus_for_h(r, 0.05)?;
    println!(
        "annulus r = {r}: {} nodes, {} triangles, h = {:.4}",
        mesh.n_nodes(),
        mesh.n_elements(),
        mesh.max_edge_length()
    );
    let cutoff = type1_cutoff(r, r).expect("cutoff exists for s = r");
    println!("continuum map folds beyond {:.3} deg\n", cutoff.to_degrees());

    println!("{:>8} {:>8} {:>8} {:>8}", "deg", "fem", "uniform", "barrier");
    for deg in [15.0, 30.0, 45.0, 50.0, 52.0, 60.0, 90.0] {
        let motion = BoundaryMotion::annulus_rotation(r, f64::to_radians(deg));
        let mut row = format!("{deg:>8}");
        for scheme in [Scheme::Fem, Scheme::Uniform, Scheme::LogBarrier] {
            let (_, report) = femwarp(&mesh, scheme, &motion)?;
            row.push_str(&format!(" {:>8}", report.quality.reversals));
        }
        println!("{row}");
    }
    Ok(())
}
