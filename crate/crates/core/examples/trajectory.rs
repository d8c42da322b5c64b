//! Following a motion given as a sequence of frames, warping each frame
//! from the previous one.

use std::f64::consts::PI;

use femwarp::assembly::Scheme;
use femwarp::generators::gen_annulus_for_h;
use femwarp::warp::{warp_trajectory, BoundaryMotion, TrajectoryOptions};

fn main() -> femwarp::Result<()> {
    let mesh = gen_annulus_for_h(0.5, 0.06)?;
    let frames = (1..=32)
        .map(|k| BoundaryMotion::annulus_rotation(0.5, k as f64 * PI / 16.0).evaluate(&mesh, 1.0))
        .collect::<femwarp::Result<Vec<_>>>()?;

    let traj = warp_trajectory(&mesh, Scheme::Fem, &frames, TrajectoryOptions::default())?;
    for (k, rep) in traj.reports.iter().enumerate() {
        println!(
            "frame {:>2} ({:>6.1} deg): {} min area {:.2e}",
            k,
            (k + 1) as f64 * 180.0 / 16.0,
            rep.outcome,
            rep.quality.signed_measure.min
        );
    }
    if let Some(k) = traj.failed_frame {
        println!("stopped at frame {k}");
    }
    Ok(())
}
