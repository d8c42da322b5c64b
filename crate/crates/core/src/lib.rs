//! Mesh warping by linear weight systems.
//!
//! Given a valid simplicial mesh and a new position for its boundary nodes,
//! the interior nodes are placed by solving one linear system per
//! coordinate axis. The weights are computed once on the original mesh and
//! reproduce any affine motion exactly.

pub mod analytic;
pub mod assembly;
pub mod cli;
pub mod error;
pub mod generators;
pub mod io;
pub mod mesh;
pub mod quality;
pub mod solve;
pub mod sparse;
pub mod untangle;
pub mod warp;

pub use error::{Error, Result};
pub use mesh::{Mesh, Simplex};
