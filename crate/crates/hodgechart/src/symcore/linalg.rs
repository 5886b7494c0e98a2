//! Dense complex linear algebra at evaluation points.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Cholesky factorization of a hermitian positive definite matrix,
/// kept around so several right hand sides can reuse it.
pub struct HermitianFactor {
    chol: nalgebra::Cholesky<Complex64, nalgebra::Dyn>,
}

impl HermitianFactor {
    /// Fails when the matrix is not positive definite (up to rounding),
    /// which is how degeneracy of a metric at a point surfaces.
    pub fn new(a: &CMat) -> Option<Self> {
        nalgebra::Cholesky::new(a.clone()).map(|chol| HermitianFactor { chol })
    }

    /// Solves `X A = B` for row-shaped unknowns: `A X^H = B^H`.
    pub fn solve_rows(&self, b: &CMat) -> CMat {
        self.chol.solve(&b.adjoint()).adjoint()
    }
}

/// Solves `X A = B` with `A` hermitian positive definite.
/// Returns `None` when the factorization fails.
pub fn hermitian_solve(a: &CMat, b: &CMat) -> Option<CMat> {
    HermitianFactor::new(a).map(|f| f.solve_rows(b))
}

/// Numerical rank via singular values, relative to the largest one.
pub fn numeric_rank(m: &CMat, rel_tol: f64) -> usize {
    let svd = nalgebra::SVD::new(m.clone(), false, false);
    let sv = &svd.singular_values;
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Least squares fit of `M` in `X M = Y` (rows of `X` map to rows of
/// `Y`). Returns the fitted matrix and the largest entry of the
/// residual `X M - Y`.
pub fn least_squares(x: &CMat, y: &CMat) -> Option<(CMat, f64)> {
    let svd = nalgebra::SVD::new(x.clone(), true, true);
    let m = svd.solve(y, 1e-13).ok()?;
    let residual = (x * &m - y)
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    Some((m, residual))
}

/// Largest entry modulus, used as the matrix sup norm throughout.
pub fn sup_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0f64, f64::max)
}
