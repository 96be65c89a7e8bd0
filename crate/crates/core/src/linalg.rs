//! Thin helpers over nalgebra for the complex matrix work shared by the
//! reduction, alignment and rate modules.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Condition-number guard applied to every channel inversion.
pub const COND_LIMIT: f64 = 1e12;

/// Relative smallest-singular-value tolerance for rank decisions.
pub const RANK_TOL: f64 = 1e-9;

/// Extreme singular values computed from the Hermitian eigenvalues of the
/// Gram matrix A^H A. Returns (smallest, largest).
pub fn singular_extremes(a: &CMat) -> (f64, f64) {
    let gram = a.adjoint() * a;
    let eig = gram.symmetric_eigenvalues();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for &l in eig.iter() {
        let l = l.max(0.0);
        lo = lo.min(l);
        hi = hi.max(l);
    }
    (lo.sqrt(), hi.sqrt())
}

/// True iff the columns of `a` are independent within `RANK_TOL`.
pub fn full_column_rank(a: &CMat) -> bool {
    let (lo, hi) = singular_extremes(a);
    hi > 0.0 && lo / hi >= RANK_TOL
}

/// Inverse of a square matrix, rejected when the condition number exceeds
/// the guard (the Monte Carlo harness resamples such draws).
pub fn inverse_guarded(a: &CMat) -> Result<CMat> {
    if !a.is_square() {
        return Err(Error::NonSquare);
    }
    let (lo, hi) = singular_extremes(a);
    if lo <= 0.0 || hi / lo > COND_LIMIT {
        return Err(Error::SingularChannel);
    }
    a.clone().try_inverse().ok_or(Error::SingularChannel)
}

/// Lower-triangular Cholesky factor of a Hermitian positive-definite matrix.
pub fn cholesky_lower(a: &CMat) -> Result<CMat> {
    let herm = hermitian_part(a);
    nalgebra::Cholesky::new(herm)
        .map(|c| c.l())
        .ok_or(Error::SingularChannel)
}

/// (A + A^H) / 2, forcing exact Hermitian symmetry before factorization.
pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// Solve A x = b for Hermitian positive-definite A via Cholesky.
pub fn solve_hpd(a: &CMat, b: &CVec) -> Result<CVec> {
    let chol = nalgebra::Cholesky::new(hermitian_part(a)).ok_or(Error::SingularChannel)?;
    Ok(chol.solve(b))
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Sum of squared column norms (trace of A A^H).
pub fn col_norm_sq_sum(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn col_norm_sq(a: &CMat, j: usize) -> f64 {
    a.column(j).iter().map(|z| z.norm_sqr()).sum()
}
