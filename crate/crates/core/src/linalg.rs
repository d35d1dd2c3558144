//! Small dense LU solver, generic over the coefficient scalar.
//!
//! The engine only ever solves 2^n x 2^n systems with n <= 8, so a plain
//! partial-pivoting LU is all that is needed. The condition estimate is the
//! cheap diagonal ratio max|u_ii| / min|u_ii|; callers treat it as a coarse
//! singularity guard, not a certified bound.

use crate::scalar::ClScalar;

/// Row-major LU factorization with row pivoting.
pub struct LuFactors<S: ClScalar> {
    n: usize,
    lu: Vec<S>,
    perm: Vec<usize>,
    min_pivot: f64,
    max_pivot: f64,
}

impl<S: ClScalar> LuFactors<S> {
    /// Factor a row-major n x n matrix. Returns `Err(cond_estimate)` when a
    /// pivot is exactly zero.
    pub fn factor(mut m: Vec<S>, n: usize) -> Result<Self, f64> {
        assert_eq!(m.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot = 0.0f64;
        for k in 0..n {
            // pivot: largest modulus in column k at or below the diagonal
            let mut best = k;
            let mut best_abs = m[perm[k] * n + k].abs();
            for r in (k + 1)..n {
                let a = m[perm[r] * n + k].abs();
                if a > best_abs {
                    best = r;
                    best_abs = a;
                }
            }
            if best_abs == 0.0 {
                return Err(f64::INFINITY);
            }
            perm.swap(k, best);
            min_pivot = min_pivot.min(best_abs);
            max_pivot = max_pivot.max(best_abs);
            let pk = perm[k];
            let diag = m[pk * n + k];
            for r in (k + 1)..n {
                let pr = perm[r];
                let factor = m[pr * n + k] / diag;
                m[pr * n + k] = factor;
                if factor == S::zero() {
                    continue;
                }
                for c in (k + 1)..n {
                    let t = factor * m[pk * n + c];
                    m[pr * n + c] -= t;
                }
            }
        }
        Ok(LuFactors {
            n,
            lu: m,
            perm,
            min_pivot,
            max_pivot,
        })
    }

    /// Diagonal-ratio condition estimate.
    pub fn condition_estimate(&self) -> f64 {
        if self.min_pivot == 0.0 {
            f64::INFINITY
        } else {
            self.max_pivot / self.min_pivot
        }
    }

    /// Solve A x = b in place (b is overwritten with x).
    pub fn solve_in_place(&self, b: &mut [S]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut y = vec![S::zero(); n];
        // forward substitution with unit lower triangle
        for i in 0..n {
            let mut acc = b[self.perm[i]];
            for j in 0..i {
                let t = self.lu[self.perm[i] * n + j] * y[j];
                acc -= t;
            }
            y[i] = acc;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in (i + 1)..n {
                let t = self.lu[self.perm[i] * n + j] * b[j];
                acc -= t;
            }
            b[i] = acc / self.lu[self.perm[i] * n + i];
        }
    }
}
