//! Matrices of coefficient functions.
//!
//! Row-major, with chart dimensions attached. These carry every
//! symbolic block in the engine: metric blocks, del-bar and connection
//! coefficients, Higgs fields, and frame changes. Determinants and
//! inverses use Laplace expansion; ranks stay small (fiber dimensions
//! of 1 to 4), so this is both exact and fast.

use num_complex::Complex64;

use super::coeff::CoeffFn;
use super::dims::{ChartPoint, Dims, Var};
use super::linalg::CMat;
use super::poly::WirtingerPoly;
use crate::error::ChartError;

#[derive(Debug, Clone)]
pub struct CoeffMat {
    dims: Dims,
    rows: usize,
    cols: usize,
    entries: Vec<CoeffFn>,
}

/// Value of a matrix together with all its Wirtinger partials at a
/// point, indexed by flat variable order.
#[derive(Debug, Clone)]
pub struct MatJet {
    pub value: CMat,
    pub d: Vec<CMat>,
}

impl CoeffMat {
    pub fn new(dims: Dims, rows: usize, cols: usize, entries: Vec<CoeffFn>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count");
        for e in &entries {
            assert_eq!(e.dims(), dims, "entry chart dims");
        }
        CoeffMat {
            dims,
            rows,
            cols,
            entries,
        }
    }

    pub fn zeros(dims: Dims, rows: usize, cols: usize) -> Self {
        CoeffMat {
            dims,
            rows,
            cols,
            entries: vec![CoeffFn::zero(dims); rows * cols],
        }
    }

    pub fn identity(dims: Dims, n: usize) -> Self {
        let mut out = Self::zeros(dims, n, n);
        for i in 0..n {
            out.set(i, i, CoeffFn::one(dims));
        }
        out
    }

    pub fn from_polys(dims: Dims, rows: usize, cols: usize, polys: Vec<WirtingerPoly>) -> Self {
        Self::new(dims, rows, cols, polys.into_iter().map(CoeffFn::from).collect())
    }

    pub fn from_constants(dims: Dims, rows: usize, cols: usize, values: &[Complex64]) -> Self {
        Self::new(
            dims,
            rows,
            cols,
            values.iter().map(|&v| CoeffFn::constant(dims, v)).collect(),
        )
    }

    /// The row vector `(t_1, ..., t_r)` of fiber coordinates, used to
    /// turn a constant-frame matrix into linear coefficient rows.
    pub fn fiber_row(dims: Dims) -> Self {
        let entries = (0..dims.r)
            .map(|k| CoeffFn::variable(dims, Var::T(k)))
            .collect();
        CoeffMat {
            dims,
            rows: 1,
            cols: dims.r,
            entries,
        }
    }

    pub fn from_rows(rows: Vec<CoeffMat>) -> Self {
        assert!(!rows.is_empty());
        let dims = rows[0].dims;
        let cols = rows[0].cols;
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in &rows {
            assert_eq!(row.rows, 1, "stacking expects single-row matrices");
            assert_eq!(row.cols, cols, "column count");
            assert_eq!(row.dims, dims, "chart dims");
            entries.extend(row.entries.iter().cloned());
        }
        CoeffMat {
            dims,
            rows: rows.len(),
            cols,
            entries,
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn check_shape(
        &self,
        rows: usize,
        cols: usize,
        context: &'static str,
    ) -> Result<(), ChartError> {
        if self.rows == rows && self.cols == cols {
            Ok(())
        } else {
            Err(ChartError::ShapeMismatch {
                expected: (rows, cols),
                got: (self.rows, self.cols),
                context,
            })
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &CoeffFn {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: CoeffFn) {
        assert_eq!(f.dims(), self.dims, "entry chart dims");
        self.entries[i * self.cols + j] = f;
    }

    pub fn entries(&self) -> &[CoeffFn] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> CoeffMat {
        CoeffMat {
            dims: self.dims,
            rows: 1,
            cols: self.cols,
            entries: self.entries[i * self.cols..(i + 1) * self.cols].to_vec(),
        }
    }

    pub fn map(&self, f: impl Fn(&CoeffFn) -> CoeffFn) -> CoeffMat {
        CoeffMat {
            dims: self.dims,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> CoeffMat {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        CoeffMat {
            dims: self.dims,
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn conj(&self) -> CoeffMat {
        self.map(|f| f.conj())
    }

    /// Conjugate transpose, entrywise in the function sense.
    pub fn adjoint(&self) -> CoeffMat {
        self.transpose().conj()
    }

    pub fn neg(&self) -> CoeffMat {
        self.map(|f| f.neg())
    }

    pub fn add(&self, other: &CoeffMat) -> CoeffMat {
        assert_eq!(self.shape(), other.shape(), "matrix shapes");
        assert_eq!(self.dims, other.dims, "chart dims");
        let entries = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a.add(b))
            .collect();
        CoeffMat {
            dims: self.dims,
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn sub(&self, other: &CoeffMat) -> CoeffMat {
        self.add(&other.neg())
    }

    pub fn scale(&self, f: &CoeffFn) -> CoeffMat {
        self.map(|e| e.mul(f))
    }

    pub fn scale_complex(&self, c: Complex64) -> CoeffMat {
        self.map(|e| e.scale(c))
    }

    pub fn mul(&self, other: &CoeffMat) -> CoeffMat {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        assert_eq!(self.dims, other.dims, "chart dims");
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = CoeffFn::zero(self.dims);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b));
                }
                entries.push(acc);
            }
        }
        CoeffMat {
            dims: self.dims,
            rows: self.rows,
            cols: other.cols,
            entries,
        }
    }

    pub fn derive(&self, var: Var) -> CoeffMat {
        self.map(|f| f.wirtinger_derive(var))
    }

    pub fn eval(&self, p: &ChartPoint) -> Result<CMat, ChartError> {
        let mut out = CMat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self.get(i, j).eval(p)?;
            }
        }
        Ok(out)
    }

    /// Value and all first Wirtinger partials at a point.
    pub fn eval_jet(&self, p: &ChartPoint) -> Result<MatJet, ChartError> {
        let nvars = self.dims.nvars();
        let mut value = CMat::zeros(self.rows, self.cols);
        let mut d = vec![CMat::zeros(self.rows, self.cols); nvars];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let (v, grad) = self.get(i, j).eval_grad(p)?;
                value[(i, j)] = v;
                for (idx, g) in grad.into_iter().enumerate() {
                    d[idx][(i, j)] = g;
                }
            }
        }
        Ok(MatJet { value, d })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|f| f.is_zero())
    }

    pub fn semantic_eq(&self, other: &CoeffMat) -> bool {
        self.shape() == other.shape()
            && self
                .entries
                .iter()
                .zip(other.entries.iter())
                .all(|(a, b)| a.semantic_eq(b))
    }

    pub fn is_hermitian(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if !self.get(i, j).conj().semantic_eq(self.get(j, i)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn uses_var(&self, var: Var) -> bool {
        self.entries.iter().any(|f| f.uses_var(var))
    }

    /// No fiber coordinate occurs at all.
    pub fn is_fiber_free(&self) -> bool {
        (0..self.dims.r).all(|k| !self.uses_var(Var::T(k)) && !self.uses_var(Var::TBar(k)))
    }

    /// No conjugate fiber coordinate occurs.
    pub fn is_tbar_free(&self) -> bool {
        (0..self.dims.r).all(|k| !self.uses_var(Var::TBar(k)))
    }

    pub fn is_holomorphic(&self) -> bool {
        self.entries.iter().all(|f| f.is_holomorphic())
    }

    pub fn det(&self) -> CoeffFn {
        assert_eq!(self.rows, self.cols, "determinant of a square matrix");
        det_laplace(self)
    }

    /// Transposed cofactor matrix, so `self * adjugate = det * id`.
    pub fn adjugate(&self) -> CoeffMat {
        assert_eq!(self.rows, self.cols, "adjugate of a square matrix");
        let n = self.rows;
        if n == 1 {
            return CoeffMat::identity(self.dims, 1);
        }
        let mut out = Self::zeros(self.dims, n, n);
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(i, j);
                let mut cof = det_laplace(&minor);
                if (i + j) % 2 == 1 {
                    cof = cof.neg();
                }
                out.set(j, i, cof);
            }
        }
        out
    }

    /// Exact inverse as coefficient functions: `adjugate / det`.
    pub fn inverse(&self) -> Result<CoeffMat, ChartError> {
        let det = self.det();
        if det.is_zero() {
            return Err(ChartError::SingularMatrix {
                what: "coefficient matrix",
            });
        }
        let recip = det.recip()?;
        Ok(self.adjugate().scale(&recip))
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> CoeffMat {
        let n = self.rows;
        let mut entries = Vec::with_capacity((n - 1) * (n - 1));
        for i in 0..n {
            if i == skip_row {
                continue;
            }
            for j in 0..n {
                if j == skip_col {
                    continue;
                }
                entries.push(self.get(i, j).clone());
            }
        }
        CoeffMat {
            dims: self.dims,
            rows: n - 1,
            cols: n - 1,
            entries,
        }
    }
}

fn det_laplace(m: &CoeffMat) -> CoeffFn {
    let n = m.nrows();
    match n {
        0 => CoeffFn::one(m.dims()),
        1 => m.get(0, 0).clone(),
        _ => {
            let mut acc = CoeffFn::zero(m.dims());
            for j in 0..n {
                let e = m.get(0, j);
                if e.is_zero() {
                    continue;
                }
                let sub = det_laplace(&m.minor(0, j));
                if sub.is_zero() {
                    continue;
                }
                let term = e.mul(&sub);
                acc = if j % 2 == 0 {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn d12() -> Dims {
        Dims::new(1, 2)
    }

    fn var(v: Var) -> WirtingerPoly {
        WirtingerPoly::variable(d12(), v)
    }

    #[test]
    fn adjugate_times_matrix_is_det_times_identity() {
        let d = d12();
        let one = WirtingerPoly::one(d);
        let m = CoeffMat::from_polys(
            d,
            3,
            3,
            vec![
                one.add(&var(Var::S(0)).mul(&var(Var::SBar(0)))),
                var(Var::S(0)),
                var(Var::T(0)),
                var(Var::SBar(0)),
                WirtingerPoly::constant(d, c(2.0, 0.0)),
                var(Var::T(1)).scale(c(0.0, 1.0)),
                var(Var::TBar(0)),
                var(Var::TBar(1)).scale(c(0.0, -1.0)),
                WirtingerPoly::constant(d, c(3.0, 0.0)),
            ],
        );
        let det = m.det();
        let prod = m.mul(&m.adjugate());
        let expect = CoeffMat::identity(d, 3).scale(&det);
        assert!(prod.semantic_eq(&expect));
    }

    #[test]
    fn inverse_of_two_by_two_polynomial_matrix() {
        let d = d12();
        let one = WirtingerPoly::one(d);
        let h = CoeffMat::from_polys(
            d,
            2,
            2,
            vec![
                one.add(&var(Var::S(0)).mul(&var(Var::SBar(0)))),
                var(Var::S(0)),
                var(Var::SBar(0)),
                WirtingerPoly::constant(d, c(2.0, 0.0)),
            ],
        );
        let hinv = h.inverse().unwrap();
        assert!(h.mul(&hinv).semantic_eq(&CoeffMat::identity(d, 2)));
        assert!(hinv.mul(&h).semantic_eq(&CoeffMat::identity(d, 2)));
    }

    #[test]
    fn diagonal_exponential_inverse_cancels_exactly() {
        // H = diag(exp(s + sb), 1): inverse diag(exp(-(s + sb)), 1)
        // through the adjugate route, with no leftover exponentials.
        let d = d12();
        let e = CoeffFn::exponential(
            WirtingerPoly::one(d),
            var(Var::S(0)).add(&var(Var::SBar(0))),
        );
        let mut h = CoeffMat::identity(d, 2);
        h.set(0, 0, e.clone());
        let hinv = h.inverse().unwrap();
        assert!(h.mul(&hinv).semantic_eq(&CoeffMat::identity(d, 2)));
        assert!(hinv.get(0, 0).semantic_eq(&e.recip().unwrap()));
        assert!(hinv.get(1, 1).semantic_eq(&CoeffFn::one(d)));
    }

    #[test]
    fn hermitian_recognizes_conjugate_symmetry() {
        let d = d12();
        let h = CoeffMat::from_polys(
            d,
            2,
            2,
            vec![
                WirtingerPoly::one(d).add(&var(Var::S(0)).mul(&var(Var::SBar(0)))),
                var(Var::S(0)),
                var(Var::SBar(0)),
                WirtingerPoly::constant(d, c(2.0, 0.0)),
            ],
        );
        assert!(h.is_hermitian());
        let mut bad = h.clone();
        bad.set(0, 1, CoeffFn::variable(d, Var::SBar(0)));
        assert!(!bad.is_hermitian());
    }

    #[test]
    fn jet_matches_symbolic_derivatives() {
        let d = d12();
        let m = CoeffMat::from_polys(
            d,
            1,
            2,
            vec![
                var(Var::S(0)).mul(&var(Var::T(0))),
                var(Var::T(1)).mul(&var(Var::T(1))).scale(c(0.5, 1.0)),
            ],
        );
        let p = ChartPoint::new(
            d,
            vec![c(0.4, -0.3)],
            vec![c(1.0, 0.5), c(-0.7, 0.2)],
        );
        let jet = m.eval_jet(&p).unwrap();
        for v in Var::all(d) {
            let expect = m.derive(v).eval(&p).unwrap();
            let got = &jet.d[v.flat(d)];
            assert!(
                (got - expect).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12,
                "jet partial in {}",
                v
            );
        }
    }

    #[test]
    fn fiber_row_times_constant_matrix_gives_linear_coefficients() {
        let d = d12();
        let theta = CoeffMat::from_constants(d, 2, 2, &[
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        ]);
        let row = CoeffMat::fiber_row(d).mul(&theta);
        assert!(row.get(0, 0).is_zero());
        assert!(row
            .get(0, 1)
            .semantic_eq(&CoeffFn::variable(d, Var::T(0))));
    }
}
