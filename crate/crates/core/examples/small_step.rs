//! Small-step warping: reach large rotations by moving the boundary in
//! pieces and rebuilding the weights after each accepted piece.
//!
//! Compares variable steps (try the biggest piece, halve on reversal) with
//! constant steps on annuli of decreasing mesh size, counting numeric
//! factorizations.

use std::f64::consts::PI;

use femwarp::assembly::Scheme;
use femwarp::generators::gen_annulus_for_h;
use femwarp::warp::{small_step_femwarp, BoundaryMotion, SmallStepOptions, StepMode};

fn main() -> femwarp::Result<()> {
    let variable = SmallStepOptions {
        min_step: 1.0 / 256.0,
        max_step: Some(0.5),
        mode: StepMode::Variable,
    };
    let constant = SmallStepOptions {
        mode: StepMode::Constant,
        ..variable
    };
    // ask for a full turn and see how far each mode gets
    let motion = BoundaryMotion::annulus_rotation(0.5, 2.0 * PI);

    println!("{:>7} {:>10} {:>8} {:>10} {:>8}", "h", "reach VS", "fac VS", "reach CS", "fac CS");
    for h in [0.2, 0.11, 0.06] {
        let mesh = gen_annulus_for_h(0.5, h)?;
        let (_, vs) = small_step_femwarp(&mesh, Scheme::Fem, &motion, variable)?;
        let (_, cs) = small_step_femwarp(&mesh, Scheme::Fem, &motion, constant)?;
        println!(
            "{:>7.3} {:>10.4} {:>8} {:>10.4} {:>8}",
            mesh.max_edge_length(),
            vs.t_reached * 2.0 * PI,
            vs.n_factorizations,
            cs.t_reached * 2.0 * PI,
            cs.n_factorizations
        );
    }
    Ok(())
}
