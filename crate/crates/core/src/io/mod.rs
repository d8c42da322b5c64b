//! File formats and drivers: Triangle/TetGen meshes, deformation specs and
//! parameter sweeps.

pub mod mesh_files;
pub mod spec;
pub mod sweep;

pub use mesh_files::{read_mesh, read_mesh_base, write_mesh, write_mesh_base};
pub use spec::{Algorithm, DeformationSpec, MotionSpec, RunOutput};
pub use sweep::{param_max, run_sweep, to_csv, ParamGrid, SweepRow};
