//! Vector fields on a chart and their Lie brackets.

use num_complex::Complex64;

use super::coeff::CoeffFn;
use super::dims::{ChartPoint, Dims, Var};
use crate::error::ChartError;

/// A vector field written over the coordinate frame
/// `d/ds_i, d/dsb_i, d/dt_k, d/dtb_k`, with one coefficient function
/// per direction in flat variable order.
#[derive(Debug, Clone)]
pub struct VectorFieldChart {
    dims: Dims,
    coeffs: Vec<CoeffFn>,
}

impl VectorFieldChart {
    pub fn zero(dims: Dims) -> Self {
        VectorFieldChart {
            dims,
            coeffs: vec![CoeffFn::zero(dims); dims.nvars()],
        }
    }

    pub fn new(dims: Dims, coeffs: Vec<CoeffFn>) -> Self {
        assert_eq!(coeffs.len(), dims.nvars(), "one coefficient per direction");
        for c in &coeffs {
            assert_eq!(c.dims(), dims, "coefficient chart dims");
        }
        VectorFieldChart { dims, coeffs }
    }

    /// The coordinate field `d/d var`.
    pub fn coordinate(dims: Dims, var: Var) -> Self {
        let mut f = Self::zero(dims);
        f.coeffs[var.flat(dims)] = CoeffFn::one(dims);
        f
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn coeff(&self, var: Var) -> &CoeffFn {
        &self.coeffs[var.flat(self.dims)]
    }

    pub fn set_coeff(&mut self, var: Var, f: CoeffFn) {
        assert_eq!(f.dims(), self.dims, "coefficient chart dims");
        self.coeffs[var.flat(self.dims)] = f;
    }

    pub fn coeffs(&self) -> &[CoeffFn] {
        &self.coeffs
    }

    pub fn add(&self, other: &VectorFieldChart) -> VectorFieldChart {
        assert_eq!(self.dims, other.dims, "chart dims");
        VectorFieldChart {
            dims: self.dims,
            coeffs: self
                .coeffs
                .iter()
                .zip(other.coeffs.iter())
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> VectorFieldChart {
        VectorFieldChart {
            dims: self.dims,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, f: &CoeffFn) -> VectorFieldChart {
        VectorFieldChart {
            dims: self.dims,
            coeffs: self.coeffs.iter().map(|c| c.mul(f)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn semantic_eq(&self, other: &VectorFieldChart) -> bool {
        self.dims == other.dims
            && self
                .coeffs
                .iter()
                .zip(other.coeffs.iter())
                .all(|(a, b)| a.semantic_eq(b))
    }

    /// Apply the field to a function as a derivation:
    /// `X(f) = sum_v X_v d_v f`.
    pub fn apply(&self, f: &CoeffFn) -> CoeffFn {
        let mut acc = CoeffFn::zero(self.dims);
        for var in Var::all(self.dims) {
            let xv = self.coeff(var);
            if xv.is_zero() {
                continue;
            }
            let df = f.wirtinger_derive(var);
            if df.is_zero() {
                continue;
            }
            acc = acc.add(&xv.mul(&df));
        }
        acc
    }

    pub fn eval(&self, p: &ChartPoint) -> Result<Vec<Complex64>, ChartError> {
        self.coeffs.iter().map(|c| c.eval(p)).collect()
    }
}

/// Lie bracket of two fields:
/// `[X, Y]_w = sum_v (X_v d_v Y_w - Y_v d_v X_w)`.
pub fn lie_bracket(x: &VectorFieldChart, y: &VectorFieldChart) -> VectorFieldChart {
    assert_eq!(x.dims(), y.dims(), "chart dims");
    let dims = x.dims();
    let coeffs = Var::all(dims)
        .map(|w| {
            let xw = x.apply(y.coeff(w));
            let yw = y.apply(x.coeff(w));
            xw.sub(&yw)
        })
        .collect();
    VectorFieldChart { dims, coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d02() -> Dims {
        Dims::new(0, 2)
    }

    fn tvar(k: usize) -> CoeffFn {
        CoeffFn::variable(d02(), Var::T(k))
    }

    #[test]
    fn sl2_commutation_relation() {
        // [t1 d/dt2, t2 d/dt1] = t1 d/dt1 - t2 d/dt2
        let d = d02();
        let mut x = VectorFieldChart::zero(d);
        x.set_coeff(Var::T(1), tvar(0));
        let mut y = VectorFieldChart::zero(d);
        y.set_coeff(Var::T(0), tvar(1));
        let got = lie_bracket(&x, &y);
        let mut want = VectorFieldChart::zero(d);
        want.set_coeff(Var::T(0), tvar(0));
        want.set_coeff(Var::T(1), tvar(1).neg());
        assert!(got.semantic_eq(&want));
    }

    #[test]
    fn bracket_is_antisymmetric() {
        let d = d02();
        let mut x = VectorFieldChart::zero(d);
        x.set_coeff(Var::T(0), tvar(0).mul(&tvar(1)));
        x.set_coeff(Var::TBar(1), tvar(0));
        let mut y = VectorFieldChart::zero(d);
        y.set_coeff(Var::T(1), tvar(1).mul(&tvar(1)));
        y.set_coeff(Var::T(0), CoeffFn::one(d));
        let xy = lie_bracket(&x, &y);
        let yx = lie_bracket(&y, &x);
        assert!(xy.semantic_eq(&yx.neg()));
    }

    #[test]
    fn jacobi_identity_on_a_fixed_triple() {
        let d = d02();
        let mut x = VectorFieldChart::zero(d);
        x.set_coeff(Var::T(0), tvar(1));
        x.set_coeff(Var::T(1), tvar(0).mul(&tvar(0)));
        let mut y = VectorFieldChart::zero(d);
        y.set_coeff(Var::T(1), tvar(0));
        y.set_coeff(Var::TBar(0), CoeffFn::one(d));
        let mut z = VectorFieldChart::zero(d);
        z.set_coeff(Var::T(0), tvar(0).mul(&tvar(1)));
        z.set_coeff(Var::TBar(1), tvar(1));

        let a = lie_bracket(&x, &lie_bracket(&y, &z));
        let b = lie_bracket(&y, &lie_bracket(&z, &x));
        let c = lie_bracket(&z, &lie_bracket(&x, &y));
        let total = a.add(&b).add(&c);
        assert!(total.is_zero(), "Jacobi identity must hold exactly");
    }

    #[test]
    fn leibniz_rule_for_function_multiples() {
        // [X, f Y] = X(f) Y + f [X, Y]
        let d = d02();
        let mut x = VectorFieldChart::zero(d);
        x.set_coeff(Var::T(0), tvar(1));
        let mut y = VectorFieldChart::zero(d);
        y.set_coeff(Var::T(1), tvar(0));
        let f = tvar(0).mul(&tvar(0)).add(&tvar(1));

        let lhs = lie_bracket(&x, &y.scale(&f));
        let rhs = y.scale(&x.apply(&f)).add(&lie_bracket(&x, &y).scale(&f));
        assert!(lhs.semantic_eq(&rhs));
    }

    #[test]
    fn mixed_wirtinger_directions_contribute() {
        // X = tb1 d/dt1 has [X, d/dtb1] = -d/dt1.
        let d = d02();
        let mut x = VectorFieldChart::zero(d);
        x.set_coeff(Var::T(0), CoeffFn::variable(d, Var::TBar(0)));
        let y = VectorFieldChart::coordinate(d, Var::TBar(0));
        let got = lie_bracket(&x, &y);
        let mut want = VectorFieldChart::zero(d);
        want.set_coeff(
            Var::T(0),
            CoeffFn::constant(d, Complex64::new(-1.0, 0.0)),
        );
        assert!(got.semantic_eq(&want));
    }
}
