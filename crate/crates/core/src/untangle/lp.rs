//! Dense tableau simplex for small problems in standard form.

/// `max cᵀy` subject to `A y ≤ b`, `y ≥ 0`, with `b ≥ 0` so the slack
/// basis is feasible.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal { y: Vec<f64>, value: f64 },
    Unbounded,
    /// Iteration cap hit; cannot happen with Bland's rule short of
    /// round-off trouble.
    Stuck,
}

const EPS: f64 = 1e-12;

impl StandardLp {
    /// Bland's rule: lowest-index improving column enters, ties in the
    /// ratio test go to the lowest-index basic variable.
    pub fn solve(&self) -> LpResult {
        let m = self.a.len();
        let n = self.c.len();
        debug_assert!(self.b.iter().all(|&v| v >= 0.0));
        let width = n + m + 1;
        let mut t = vec![vec![0.0; width]; m + 1];
        for i in 0..m {
            t[i][..n].copy_from_slice(&self.a[i]);
            t[i][n + i] = 1.0;
            t[i][width - 1] = self.b[i];
        }
        // objective row holds reduced costs c_j - z_j
        t[m][..n].copy_from_slice(&self.c);
        let mut basis: Vec<usize> = (n..n + m).collect();

        for _ in 0..50 * (m + n + 1) {
            let Some(enter) = (0..n + m).find(|&j| t[m][j] > EPS) else {
                let mut y = vec![0.0; n];
                for (i, &bv) in basis.iter().enumerate() {
                    if bv < n {
                        y[bv] = t[i][width - 1];
                    }
                }
                let value = self.c.iter().zip(&y).map(|(c, v)| c * v).sum();
                return LpResult::Optimal { y, value };
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let p = t[i][enter];
                if p > EPS {
                    let ratio = t[i][width - 1] / p;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            let tol = 1e-14 * best.abs().max(1.0);
                            if ratio < best - tol || (ratio <= best + tol && basis[i] < basis[k]) {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return LpResult::Unbounded;
            };
            let piv = t[row][enter];
            for v in t[row].iter_mut() {
                *v /= piv;
            }
            let pivot_row = t[row].clone();
            for (i, r) in t.iter_mut().enumerate() {
                if i != row {
                    let f = r[enter];
                    if f != 0.0 {
                        for (v, p) in r.iter_mut().zip(&pivot_row) {
                            *v -= f * p;
                        }
                    }
                }
            }
            basis[row] = enter;
        }
        LpResult::Stuck
    }
}
