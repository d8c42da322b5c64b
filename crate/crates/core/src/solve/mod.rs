//! Linear-system backends: envelope Cholesky/LU with symbolic reuse,
//! Gauss-Seidel and conjugate gradients.

mod factor;
mod iterative;
mod ordering;

pub use factor::{factor, factor_lu, FactorKind, Factorization, Symbolic};
pub use iterative::{conjugate_gradient, gauss_seidel, relative_residual, IterOptions, IterOutcome};
pub use ordering::reverse_cuthill_mckee;
