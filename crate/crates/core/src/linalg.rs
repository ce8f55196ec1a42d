//! Small Hermitian positive-definite kernels for the per-frequency solves.
//!
//! The fast cost and MAP paths reduce to N^2 independent S x S Hermitian
//! systems, with S rarely above 4. Matrices are row-major slices; the solver
//! owns its scratch so the per-frequency loops stay allocation-free.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// In-place lower Cholesky of a Hermitian positive definite matrix.
///
/// Only the lower triangle (diagonal included) is read and written. On
/// failure returns the index of the first non-positive pivot.
fn cholesky_in_place(a: &mut [Complex64], s: usize) -> Result<(), usize> {
    for j in 0..s {
        let mut d = a[j * s + j].re;
        for k in 0..j {
            d -= a[j * s + k].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(j);
        }
        let pivot = d.sqrt();
        a[j * s + j] = Complex64::new(pivot, 0.0);
        for i in (j + 1)..s {
            let mut v = a[i * s + j];
            for k in 0..j {
                v -= a[i * s + k] * a[j * s + k].conj();
            }
            a[i * s + j] = v / pivot;
        }
    }
    Ok(())
}

/// Cholesky with symmetric diagonal pivoting: factors P A P^T = L L^H.
/// Succeeds on some marginally conditioned inputs where the unpivoted
/// factorization hits a non-positive pivot early.
fn pivoted_cholesky_in_place(a: &mut [Complex64], s: usize, perm: &mut [usize]) -> Result<(), usize> {
    for (i, p) in perm.iter_mut().enumerate() {
        *p = i;
    }
    for j in 0..s {
        // Select the largest remaining updated diagonal as the pivot.
        let mut best = j;
        let mut best_val = updated_diagonal(a, s, j, j);
        for i in (j + 1)..s {
            let v = updated_diagonal(a, s, i, j);
            if v > best_val {
                best = i;
                best_val = v;
            }
        }
        if best != j {
            swap_symmetric(a, s, j, best);
            perm.swap(j, best);
        }
        let mut d = a[j * s + j].re;
        for k in 0..j {
            d -= a[j * s + k].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(j);
        }
        let pivot = d.sqrt();
        a[j * s + j] = Complex64::new(pivot, 0.0);
        for i in (j + 1)..s {
            let mut v = a[i * s + j];
            for k in 0..j {
                v -= a[i * s + k] * a[j * s + k].conj();
            }
            a[i * s + j] = v / pivot;
        }
    }
    Ok(())
}

fn updated_diagonal(a: &[Complex64], s: usize, i: usize, j: usize) -> f64 {
    let mut d = a[i * s + i].re;
    for k in 0..j {
        d -= a[i * s + k].norm_sqr();
    }
    d
}

/// Swap rows and columns i <-> j of a Hermitian matrix stored fully.
fn swap_symmetric(a: &mut [Complex64], s: usize, i: usize, j: usize) {
    for k in 0..s {
        a.swap(i * s + k, j * s + k);
    }
    for k in 0..s {
        a.swap(k * s + i, k * s + j);
    }
}

/// Reusable factorization workspace for one block size.
pub(crate) struct HermitianSolver {
    s: usize,
    factor: Vec<Complex64>,
    perm: Vec<usize>,
    pivoted: bool,
    scratch: Vec<Complex64>,
}

impl HermitianSolver {
    pub fn new(s: usize) -> Self {
        HermitianSolver {
            s,
            factor: vec![ZERO; s * s],
            perm: (0..s).collect(),
            pivoted: false,
            scratch: vec![ZERO; s],
        }
    }

    /// Factor a Hermitian PD block; tries the plain Cholesky first and falls
    /// back to the pivoted variant. `Err(())` means not positive definite.
    pub fn factor(&mut self, block: &[Complex64]) -> Result<(), ()> {
        debug_assert_eq!(block.len(), self.s * self.s);
        self.factor.copy_from_slice(block);
        self.pivoted = false;
        if cholesky_in_place(&mut self.factor, self.s).is_ok() {
            return Ok(());
        }
        self.factor.copy_from_slice(block);
        self.pivoted = true;
        pivoted_cholesky_in_place(&mut self.factor, self.s, &mut self.perm).map_err(|_| ())
    }

    /// Trace of the inverse of the factored block: || L^-1 ||_F^2.
    /// Invariant under the symmetric permutation, so pivoting needs no undo.
    pub fn trace_inverse(&mut self) -> f64 {
        let s = self.s;
        let l = &self.factor;
        let x = &mut self.scratch;
        let mut total = 0.0;
        for j in 0..s {
            for i in j..s {
                let mut v = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    ZERO
                };
                for k in j..i {
                    v -= l[i * s + k] * x[k];
                }
                let xi = v / l[i * s + i];
                x[i] = xi;
                total += xi.norm_sqr();
            }
        }
        total
    }

    /// Solve (factored block) * x = rhs in place.
    pub fn solve(&mut self, rhs: &mut [Complex64]) {
        debug_assert_eq!(rhs.len(), self.s);
        let s = self.s;
        if self.pivoted {
            for i in 0..s {
                self.scratch[i] = rhs[self.perm[i]];
            }
            rhs.copy_from_slice(&self.scratch);
        }
        let l = &self.factor;
        for i in 0..s {
            let mut v = rhs[i];
            for k in 0..i {
                v -= l[i * s + k] * rhs[k];
            }
            rhs[i] = v / l[i * s + i];
        }
        for i in (0..s).rev() {
            let mut v = rhs[i];
            for k in (i + 1)..s {
                v -= l[k * s + i].conj() * rhs[k];
            }
            rhs[i] = v / l[i * s + i];
        }
        if self.pivoted {
            for i in 0..s {
                self.scratch[self.perm[i]] = rhs[i];
            }
            rhs.copy_from_slice(&self.scratch);
        }
    }
}
