//! Envelope (profile) factorizations with a reusable symbolic phase.
//!
//! The symbolic phase orders the matrix with reverse Cuthill-McKee and
//! records the row envelope of the permuted pattern. Any matrix with the same
//! pattern can then be factored numerically without repeating that work.
//! Symmetric positive definite matrices get a Cholesky factor; general
//! matrices with a structurally symmetric pattern get an LU factor without
//! pivoting, which is stable for the diagonally dominant weight systems
//! produced by the scaled schemes.

use std::sync::Arc;

use super::ordering::reverse_cuthill_mckee;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Ordering and envelope structure for one sparsity pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbolic {
    n: usize,
    /// new index -> old index
    perm: Vec<usize>,
    /// old index -> new index
    inv: Vec<usize>,
    /// first column of the envelope of each permuted row
    first: Vec<usize>,
    /// offset of each permuted row in the envelope storage
    env_ptr: Vec<usize>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl Symbolic {
    pub fn analyze(a: &CsrMatrix) -> Result<Symbolic> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.ncols(),
            });
        }
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for &j in a.row(i).0 {
                let (pi, pj) = (inv[i], inv[j]);
                let (hi, lo) = (pi.max(pj), pi.min(pj));
                first[hi] = first[hi].min(lo);
            }
        }
        let mut env_ptr = Vec::with_capacity(n + 1);
        env_ptr.push(0);
        for i in 0..n {
            env_ptr.push(env_ptr[i] + (i - first[i]));
        }
        Ok(Symbolic {
            n,
            perm,
            inv,
            first,
            env_ptr,
            row_ptr: a.row_ptr().to_vec(),
            col_idx: a.col_idx().to_vec(),
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Number of stored off-diagonal entries per triangular factor.
    pub fn envelope_size(&self) -> usize {
        self.env_ptr[self.n]
    }

    /// The ordering, new index -> old index.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// True iff `a` has exactly the pattern this analysis was built for.
    pub fn matches(&self, a: &CsrMatrix) -> bool {
        a.nrows() == self.n && a.ncols() == self.n && a.row_ptr() == self.row_ptr && a.col_idx() == self.col_idx
    }

    fn check(&self, a: &CsrMatrix) -> Result<()> {
        if self.matches(a) {
            Ok(())
        } else {
            Err(Error::SingularSystem(
                "matrix pattern differs from the symbolic analysis".into(),
            ))
        }
    }

    /// Scatters `a` into permuted envelope storage.
    fn scatter(&self, a: &CsrMatrix, lower: &mut [f64], upper: Option<&mut [f64]>, diag: &mut [f64]) {
        lower.fill(0.0);
        diag.fill(0.0);
        let mut upper = upper;
        if let Some(u) = upper.as_deref_mut() {
            u.fill(0.0);
        }
        for i in 0..self.n {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let (r, c) = (self.inv[i], self.inv[j]);
                if r == c {
                    diag[r] = v;
                } else if c < r {
                    lower[self.env_ptr[r] + c - self.first[r]] = v;
                } else if let Some(u) = upper.as_deref_mut() {
                    u[self.env_ptr[c] + r - self.first[c]] = v;
                }
            }
        }
    }

    fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        self.env_ptr[i]..self.env_ptr[i + 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    Cholesky,
    Lu,
}

/// A numeric factor, immutable once built and safe to share across threads.
#[derive(Debug, Clone)]
pub struct Factorization {
    symbolic: Arc<Symbolic>,
    kind: FactorKind,
    /// Cholesky: rows of L; LU: rows of unit-lower L (strictly below diagonal).
    lower: Vec<f64>,
    /// LU only: columns of U (strictly above diagonal).
    upper: Vec<f64>,
    /// Cholesky: diagonal of L; LU: diagonal of U.
    diag: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cholesky factorization of a symmetric positive definite matrix.
pub fn factor(a: &CsrMatrix) -> Result<Factorization> {
    Factorization::cholesky(Arc::new(Symbolic::analyze(a)?), a)
}

/// LU factorization (no pivoting) of a matrix with symmetric pattern.
pub fn factor_lu(a: &CsrMatrix) -> Result<Factorization> {
    Factorization::lu(Arc::new(Symbolic::analyze(a)?), a)
}

impl Factorization {
    /// Numeric Cholesky phase on a precomputed analysis.
    pub fn cholesky(symbolic: Arc<Symbolic>, a: &CsrMatrix) -> Result<Factorization> {
        symbolic.check(a)?;
        let s = &*symbolic;
        let mut lower = vec![0.0; s.envelope_size()];
        let mut diag = vec![0.0; s.n];
        s.scatter(a, &mut lower, None, &mut diag);
        for i in 0..s.n {
            let fi = s.first[i];
            let (done, rest) = lower.split_at_mut(s.env_ptr[i]);
            let row_i = &mut rest[..s.env_ptr[i + 1] - s.env_ptr[i]];
            for j in fi..i {
                let fj = s.first[j];
                let k0 = fi.max(fj);
                let row_j = &done[s.row_range(j)];
                let acc = dot(&row_i[k0 - fi..j - fi], &row_j[k0 - fj..j - fj]);
                row_i[j - fi] = (row_i[j - fi] - acc) / diag[j];
            }
            let pivot = diag[i] - dot(row_i, row_i);
            if !(pivot > 0.0) {
                return Err(Error::NotPositiveDefinite {
                    row: s.perm[i],
                    pivot,
                });
            }
            diag[i] = pivot.sqrt();
        }
        Ok(Factorization {
            symbolic,
            kind: FactorKind::Cholesky,
            lower,
            upper: Vec::new(),
            diag,
        })
    }

    /// Numeric LU phase on a precomputed analysis.
    pub fn lu(symbolic: Arc<Symbolic>, a: &CsrMatrix) -> Result<Factorization> {
        symbolic.check(a)?;
        let s = &*symbolic;
        let mut lower = vec![0.0; s.envelope_size()];
        let mut upper = vec![0.0; s.envelope_size()];
        let mut diag = vec![0.0; s.n];
        s.scatter(a, &mut lower, Some(&mut upper), &mut diag);
        let scale = a.norm_inf().max(f64::MIN_POSITIVE);
        for i in 0..s.n {
            let fi = s.first[i];
            let len = s.env_ptr[i + 1] - s.env_ptr[i];
            let (l_done, l_rest) = lower.split_at_mut(s.env_ptr[i]);
            let (u_done, u_rest) = upper.split_at_mut(s.env_ptr[i]);
            let row_i = &mut l_rest[..len];
            let col_i = &mut u_rest[..len];
            for j in fi..i {
                let fj = s.first[j];
                let k0 = fi.max(fj);
                let row_j = &l_done[s.row_range(j)];
                let col_j = &u_done[s.row_range(j)];
                col_i[j - fi] -= dot(&row_j[k0 - fj..j - fj], &col_i[k0 - fi..j - fi]);
                let acc = dot(&row_i[k0 - fi..j - fi], &col_j[k0 - fj..j - fj]);
                row_i[j - fi] = (row_i[j - fi] - acc) / diag[j];
            }
            diag[i] -= dot(row_i, col_i);
            if !(diag[i].abs() > 1e-14 * scale) {
                return Err(Error::SingularSystem(format!(
                    "zero pivot {:e} at row {}",
                    diag[i], s.perm[i]
                )));
            }
        }
        Ok(Factorization {
            symbolic,
            kind: FactorKind::Lu,
            lower,
            upper,
            diag,
        })
    }

    /// Refactors a matrix with the same pattern, reusing the ordering.
    pub fn refactor(&self, a: &CsrMatrix) -> Result<Factorization> {
        match self.kind {
            FactorKind::Cholesky => Self::cholesky(self.symbolic.clone(), a),
            FactorKind::Lu => Self::lu(self.symbolic.clone(), a),
        }
    }

    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    pub fn symbolic(&self) -> &Arc<Symbolic> {
        &self.symbolic
    }

    pub fn order(&self) -> usize {
        self.symbolic.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let s = &*self.symbolic;
        if b.len() != s.n {
            return Err(Error::DimensionMismatch {
                expected: s.n,
                got: b.len(),
            });
        }
        let mut y: Vec<f64> = s.perm.iter().map(|&old| b[old]).collect();
        match self.kind {
            FactorKind::Cholesky => {
                for i in 0..s.n {
                    let fi = s.first[i];
                    let row = &self.lower[s.row_range(i)];
                    y[i] = (y[i] - dot(row, &y[fi..i])) / self.diag[i];
                }
                for i in (0..s.n).rev() {
                    y[i] /= self.diag[i];
                    let fi = s.first[i];
                    let xi = y[i];
                    for (yk, l) in y[fi..i].iter_mut().zip(&self.lower[s.row_range(i)]) {
                        *yk -= l * xi;
                    }
                }
            }
            FactorKind::Lu => {
                for i in 0..s.n {
                    let fi = s.first[i];
                    let row = &self.lower[s.row_range(i)];
                    y[i] -= dot(row, &y[fi..i]);
                }
                for i in (0..s.n).rev() {
                    y[i] /= self.diag[i];
                    let fi = s.first[i];
                    let xi = y[i];
                    for (yk, u) in y[fi..i].iter_mut().zip(&self.upper[s.row_range(i)]) {
                        *yk -= u * xi;
                    }
                }
            }
        }
        let mut x = vec![0.0; s.n];
        for (new, &old) in s.perm.iter().enumerate() {
            x[old] = y[new];
        }
        Ok(x)
    }

    /// Solves one system per right-hand side column.
    pub fn solve_multi(&self, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        if rhs.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        rhs.iter().map(|b| self.solve(b)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tridiag(n: usize) -> CsrMatrix {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            d[i * n + i] = 2.0;
            if i + 1 < n {
                d[i * n + i + 1] = -1.0;
                d[(i + 1) * n + i] = -1.0;
            }
        }
        CsrMatrix::from_dense(n, n, &d)
    }

    #[test]
    fn two_by_two_spd() {
        let a = CsrMatrix::from_dense(2, 2, &[2.0, -1.0, -1.0, 2.0]);
        let f = factor(&a).unwrap();
        let x = f.solve(&[1.0, 1.0]).unwrap();
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(x[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn indefinite_is_rejected() {
        let a = CsrMatrix::from_dense(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(factor(&a), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn lu_solves_nonsymmetric_dominant_system() {
        let d = [1.0, -0.5, 0.0, -0.25, 1.0, -0.75, 0.0, -0.1, 1.0];
        let a = CsrMatrix::from_dense(3, 3, &d);
        let f = factor_lu(&a).unwrap();
        let b = [1.0, 2.0, 3.0];
        let x = f.solve(&b).unwrap();
        let r = a.mul_vec(&x).unwrap();
        for (ri, bi) in r.iter().zip(b) {
            assert_relative_eq!(*ri, bi, epsilon = 1e-14);
        }
    }

    #[test]
    fn singular_lu_is_reported() {
        let a = CsrMatrix::from_dense(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        assert!(matches!(factor_lu(&a), Err(Error::SingularSystem(_))));
    }

    #[test]
    fn refactor_reuses_symbolic() {
        let a = tridiag(6);
        let f = factor(&a).unwrap();
        let mut b = a.clone();
        for v in b.values_mut() {
            *v *= 3.0;
        }
        let g = f.refactor(&b).unwrap();
        assert!(Arc::ptr_eq(f.symbolic(), g.symbolic()));
        let x = g.solve(&[3.0; 6]).unwrap();
        let r = b.mul_vec(&x).unwrap();
        for ri in r {
            assert_relative_eq!(ri, 3.0, epsilon = 1e-13);
        }
        let other = tridiag(5);
        assert!(f.refactor(&other).is_err());
    }

    #[test]
    fn multi_rhs_matches_single_solves_bitwise() {
        let a = tridiag(7);
        let f = factor(&a).unwrap();
        let cols: Vec<Vec<f64>> = (0..3)
            .map(|k| (0..7).map(|i| (i * (k + 1)) as f64 - 2.0).collect())
            .collect();
        let multi = f.solve_multi(&cols).unwrap();
        for (c, x) in cols.iter().zip(&multi) {
            assert_eq!(&f.solve(c).unwrap(), x);
        }
        let zero = f.solve_multi(&[vec![0.0; 7]]).unwrap();
        assert!(zero[0].iter().all(|&v| v == 0.0));
        assert!(f.solve_multi(&[]).is_err());
        assert!(f.solve(&[1.0]).is_err());
    }
}
