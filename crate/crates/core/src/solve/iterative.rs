//! Stationary and Krylov iterations on CSR matrices.
//!
//! Convergence is measured by the normwise relative residual
//! `‖b − A x‖∞ / (‖A‖∞ ‖x‖∞ + ‖b‖∞)`, taken as the maximum over right-hand
//! side columns.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterOptions {
    pub tol: f64,
    /// `None` means `10 · n`.
    pub max_iters: Option<usize>,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions {
            tol: 1e-10,
            max_iters: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterOutcome {
    pub x: Vec<Vec<f64>>,
    /// Sweeps (Gauss-Seidel) or iterations (CG) performed.
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Normwise relative residual of one column.
pub fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x).expect("dimensions checked by caller");
    let r = ax.iter().zip(b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
    let denom = a.norm_inf() * inf_norm(x) + inf_norm(b);
    if denom == 0.0 {
        r
    } else {
        r / denom
    }
}

fn check_dims(a: &CsrMatrix, rhs: &[Vec<f64>], x0: &[Vec<f64>]) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    if rhs.len() != x0.len() {
        return Err(Error::DimensionMismatch {
            expected: rhs.len(),
            got: x0.len(),
        });
    }
    for v in rhs.iter().chain(x0) {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
    }
    Ok(())
}

const DIVERGENCE_WINDOW: usize = 10;

/// Gauss-Seidel sweeps in ascending row order until the residual drops
/// below `opts.tol` or the sweep budget runs out.
///
/// Returns [`Error::Diverged`] when the residual grows on ten consecutive
/// sweeps.
pub fn gauss_seidel(a: &CsrMatrix, rhs: &[Vec<f64>], x0: Vec<Vec<f64>>, opts: IterOptions) -> Result<IterOutcome> {
    check_dims(a, rhs, &x0)?;
    let n = a.nrows();
    let diag = a.diagonal();
    if let Some(i) = diag.iter().position(|&d| d == 0.0) {
        return Err(Error::SingularSystem(format!("zero diagonal at row {i}")));
    }
    let max = opts.max_iters.unwrap_or(10 * n);
    let residual = |x: &[Vec<f64>]| {
        x.iter()
            .zip(rhs)
            .map(|(xc, bc)| relative_residual(a, xc, bc))
            .fold(0.0, f64::max)
    };
    // growth is tracked on the unscaled residual, since the normwise one
    // saturates as x blows up
    let absolute = |x: &[Vec<f64>]| {
        x.iter()
            .zip(rhs)
            .map(|(xc, bc)| {
                let ax = a.mul_vec(xc).expect("dimensions checked");
                ax.iter().zip(bc).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()))
            })
            .fold(0.0, f64::max)
    };
    let mut x = x0;
    let mut res = residual(&x);
    let mut abs_res = absolute(&x);
    let mut sweeps = 0;
    let mut growth = 0;
    while res > opts.tol && sweeps < max {
        for (xc, bc) in x.iter_mut().zip(rhs) {
            for i in 0..n {
                let (cols, vals) = a.row(i);
                let mut s = bc[i];
                for (&j, &v) in cols.iter().zip(vals) {
                    if j != i {
                        s -= v * xc[j];
                    }
                }
                xc[i] = s / diag[i];
            }
        }
        sweeps += 1;
        let next = residual(&x);
        let next_abs = absolute(&x);
        if !next.is_finite() || !next_abs.is_finite() {
            return Err(Error::Diverged { sweeps });
        }
        growth = if next_abs > abs_res { growth + 1 } else { 0 };
        if growth >= DIVERGENCE_WINDOW {
            return Err(Error::Diverged { sweeps });
        }
        res = next;
        abs_res = next_abs;
    }
    Ok(IterOutcome {
        x,
        iterations: sweeps,
        residual: res,
        converged: res <= opts.tol,
    })
}

/// Unpreconditioned conjugate gradients for a symmetric positive definite
/// matrix, one column at a time.
pub fn conjugate_gradient(
    a: &CsrMatrix,
    rhs: &[Vec<f64>],
    x0: Vec<Vec<f64>>,
    opts: IterOptions,
) -> Result<IterOutcome> {
    check_dims(a, rhs, &x0)?;
    let n = a.nrows();
    let max = opts.max_iters.unwrap_or(10 * n);
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| p * q).sum::<f64>();
    let mut out = Vec::with_capacity(rhs.len());
    let mut iterations = 0;
    let mut worst: f64 = 0.0;
    for (mut x, b) in x0.into_iter().zip(rhs) {
        let ax = a.mul_vec(&x)?;
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        let mut it = 0;
        let mut res = relative_residual(a, &x, b);
        while res > opts.tol && it < max {
            let ap = a.mul_vec(&p)?;
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return Err(Error::NotPositiveDefinite { row: 0, pivot: pap });
            }
            let alpha = rr / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_next = dot(&r, &r);
            let beta = rr_next / rr;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
            rr = rr_next;
            it += 1;
            res = relative_residual(a, &x, b);
        }
        iterations = iterations.max(it);
        worst = worst.max(res);
        out.push(x);
    }
    Ok(IterOutcome {
        x: out,
        iterations,
        residual: worst,
        converged: worst <= opts.tol,
    })
}
