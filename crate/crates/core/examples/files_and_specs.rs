//! Reading and writing `.node`/`.ele` files and running a text spec, the
//! same path the command-line tool takes.

use femwarp::generators::gen_annulus;
use femwarp::io::{read_mesh_base, write_mesh_base, DeformationSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("femwarp-example");
    std::fs::create_dir_all(&dir)?;
    let base = dir.join("annulus");
    write_mesh_base(&gen_annulus(0.5, 6, 36)?, &base)?;
    let mesh = read_mesh_base(&base)?;
    println!("read {} nodes from {}", mesh.n_nodes(), base.with_extension("node").display());

    let text = "\
# turn the outer circle and shrink the hole
motion = annulus
theta_outer = 80deg
s = 0.4
algorithm = small_step
";
    let spec = DeformationSpec::parse(text, &dir)?;
    let out = spec.run(&mesh)?;
    print!("{}", out.report);
    write_mesh_base(&out.mesh, &dir.join("warped"))?;
    println!("wrote {}", dir.join("warped.node").display());
    Ok(())
}
