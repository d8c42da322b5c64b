//! Sweeping the strength of a nonlinear 3D deformation on a tetrahedral
//! cube and recording the largest value each algorithm survives.

use std::path::Path;

use femwarp::io::{param_max, read_mesh_base, run_sweep, Algorithm, DeformationSpec, MotionSpec, ParamGrid};

fn main() -> femwarp::Result<()> {
    let base = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/cube");
    let mesh = read_mesh_base(&base)?;
    println!("cube: {} nodes, {} tetrahedra", mesh.n_nodes(), mesh.n_elements());

    let grid = ParamGrid::parse("0.5:8.0:0.5")?;
    let mut spec = DeformationSpec::new(MotionSpec::Paper3d { alpha: 0.5 });
    spec.min_step_abs = Some(grid.step);
    for algorithm in [Algorithm::Femwarp, Algorithm::SmallStep, Algorithm::Hybrid] {
        spec.algorithm = algorithm;
        let rows = run_sweep(&mesh, &spec, &grid.values())?;
        match param_max(&rows) {
            Some(best) => println!(
                "{:<10} alpha_max = {:.1} ({} factorizations)",
                algorithm.name(),
                best.param,
                best.n_factorizations
            ),
            None => println!("{:<10} fails at the first value", algorithm.name()),
        }
    }
    Ok(())
}
