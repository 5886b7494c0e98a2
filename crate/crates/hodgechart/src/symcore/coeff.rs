//! Coefficient functions: polynomial quotients with an exponential factor.
//!
//! A `CoeffFn` represents `(num / den) * exp(expo)` with all three parts
//! Wirtinger polynomials. The class is closed under multiplication,
//! conjugation, Wirtinger differentiation, and reciprocals, which is
//! exactly what chart constructions produce: rational expressions from
//! matrix inverses and exponential factors from metrics like
//! `exp(s + sb)`. Sums only exist when the exponential parts agree.

use num_complex::Complex64;

use super::dims::{ChartPoint, Dims, Var};
use super::poly::WirtingerPoly;
use crate::error::ChartError;

/// Threshold below which a denominator value counts as a pole.
const DEN_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct CoeffFn {
    num: WirtingerPoly,
    den: WirtingerPoly,
    expo: WirtingerPoly,
}

impl CoeffFn {
    pub fn zero(dims: Dims) -> Self {
        CoeffFn {
            num: WirtingerPoly::zero(dims),
            den: WirtingerPoly::one(dims),
            expo: WirtingerPoly::zero(dims),
        }
    }

    pub fn one(dims: Dims) -> Self {
        WirtingerPoly::one(dims).into()
    }

    pub fn constant(dims: Dims, c: Complex64) -> Self {
        WirtingerPoly::constant(dims, c).into()
    }

    pub fn variable(dims: Dims, var: Var) -> Self {
        WirtingerPoly::variable(dims, var).into()
    }

    /// `num / den` with trivial exponential part.
    pub fn rational(num: WirtingerPoly, den: WirtingerPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let dims = num.dims();
        assert_eq!(dims, den.dims(), "coefficient chart dims");
        CoeffFn {
            num,
            den,
            expo: WirtingerPoly::zero(dims),
        }
        .canonicalized()
    }

    /// `num * exp(expo)`.
    pub fn exponential(num: WirtingerPoly, expo: WirtingerPoly) -> Self {
        let dims = num.dims();
        assert_eq!(dims, expo.dims(), "coefficient chart dims");
        CoeffFn {
            num,
            den: WirtingerPoly::one(dims),
            expo,
        }
        .canonicalized()
    }

    pub fn from_parts(num: WirtingerPoly, den: WirtingerPoly, expo: WirtingerPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let dims = num.dims();
        assert_eq!(dims, den.dims(), "coefficient chart dims");
        assert_eq!(dims, expo.dims(), "coefficient chart dims");
        CoeffFn { num, den, expo }.canonicalized()
    }

    /// The zero function is stored in one canonical shape so that it is
    /// compatible with every exponential part under addition.
    fn canonicalized(self) -> Self {
        if self.num.is_zero() {
            Self::zero(self.num.dims())
        } else {
            self
        }
    }

    pub fn dims(&self) -> Dims {
        self.num.dims()
    }

    pub fn num(&self) -> &WirtingerPoly {
        &self.num
    }

    pub fn den(&self) -> &WirtingerPoly {
        &self.den
    }

    pub fn expo(&self) -> &WirtingerPoly {
        &self.expo
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True when the function is a plain polynomial.
    pub fn is_polynomial(&self) -> bool {
        self.den.constant_value() == Some(Complex64::new(1.0, 0.0)) && self.expo.is_zero()
    }

    pub fn as_polynomial(&self) -> Option<&WirtingerPoly> {
        if self.is_polynomial() {
            Some(&self.num)
        } else {
            None
        }
    }

    /// Structural occurrence check across all three parts. A variable
    /// that cancels between numerator and denominator still counts as
    /// used; constructions keep their coefficients in the shape they
    /// were produced, so this conservative answer is the honest one.
    pub fn uses_var(&self, var: Var) -> bool {
        self.num.uses_var(var) || self.den.uses_var(var) || self.expo.uses_var(var)
    }

    pub fn is_holomorphic(&self) -> bool {
        self.num.is_holomorphic() && self.den.is_holomorphic() && self.expo.is_holomorphic()
    }

    pub fn neg(&self) -> CoeffFn {
        CoeffFn {
            num: self.num.neg(),
            den: self.den.clone(),
            expo: self.expo.clone(),
        }
    }

    pub fn scale(&self, c: Complex64) -> CoeffFn {
        CoeffFn {
            num: self.num.scale(c),
            den: self.den.clone(),
            expo: self.expo.clone(),
        }
        .canonicalized()
    }

    pub fn mul(&self, other: &CoeffFn) -> CoeffFn {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.dims());
        }
        CoeffFn {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
            expo: self.expo.add(&other.expo),
        }
    }

    pub fn mul_poly(&self, p: &WirtingerPoly) -> CoeffFn {
        CoeffFn {
            num: self.num.mul(p),
            den: self.den.clone(),
            expo: self.expo.clone(),
        }
        .canonicalized()
    }

    /// Addition is partial: both summands must carry the same
    /// exponential part. Zero is compatible with everything.
    pub fn checked_add(&self, other: &CoeffFn) -> Result<CoeffFn, ChartError> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.expo != other.expo {
            return Err(ChartError::IncompatibleExponentials {
                context: "sum of coefficient functions",
            });
        }
        let (num, den) = if self.den == other.den {
            (self.num.add(&other.num), self.den.clone())
        } else {
            (
                self.num.mul(&other.den).add(&other.num.mul(&self.den)),
                self.den.mul(&other.den),
            )
        };
        Ok(CoeffFn {
            num,
            den,
            expo: self.expo.clone(),
        }
        .canonicalized())
    }

    pub fn add(&self, other: &CoeffFn) -> CoeffFn {
        self.checked_add(other)
            .expect("coefficient functions with incompatible exponential parts")
    }

    pub fn sub(&self, other: &CoeffFn) -> CoeffFn {
        self.add(&other.neg())
    }

    pub fn conj(&self) -> CoeffFn {
        CoeffFn {
            num: self.num.conj(),
            den: self.den.conj(),
            expo: self.expo.conj(),
        }
    }

    pub fn recip(&self) -> Result<CoeffFn, ChartError> {
        if self.is_zero() {
            return Err(ChartError::SingularMatrix {
                what: "reciprocal of the zero coefficient",
            });
        }
        Ok(CoeffFn {
            num: self.den.clone(),
            den: self.num.clone(),
            expo: self.expo.neg(),
        })
    }

    /// Quotient and product rule combined:
    /// `d((n/d) e^E) = ((n' d - n d' + n d E') / d^2) e^E`.
    pub fn wirtinger_derive(&self, var: Var) -> CoeffFn {
        if self.is_zero() {
            return self.clone();
        }
        let n = &self.num;
        let d = &self.den;
        let np = n.wirtinger_derive(var);
        let ep = self.expo.wirtinger_derive(var);
        if d.constant_value() == Some(Complex64::new(1.0, 0.0)) {
            return CoeffFn {
                num: np.add(&n.mul(&ep)),
                den: d.clone(),
                expo: self.expo.clone(),
            }
            .canonicalized();
        }
        let dp = d.wirtinger_derive(var);
        CoeffFn {
            num: np.mul(d).sub(&n.mul(&dp)).add(&n.mul(d).mul(&ep)),
            den: d.mul(d),
            expo: self.expo.clone(),
        }
        .canonicalized()
    }

    pub fn eval(&self, p: &ChartPoint) -> Result<Complex64, ChartError> {
        let den = self.den.eval(p);
        if den.norm() < DEN_EPS {
            return Err(ChartError::DenominatorVanishes {
                s: p.s.clone(),
                t: p.t.clone(),
            });
        }
        let mut value = self.num.eval(p) / den;
        if !self.expo.is_zero() {
            value *= self.expo.eval(p).exp();
        }
        Ok(value)
    }

    /// Value and all Wirtinger partials at one point.
    pub fn eval_grad(&self, p: &ChartPoint) -> Result<(Complex64, Vec<Complex64>), ChartError> {
        let (dval, dgrad) = self.den.eval_grad(p);
        if dval.norm() < DEN_EPS {
            return Err(ChartError::DenominatorVanishes {
                s: p.s.clone(),
                t: p.t.clone(),
            });
        }
        let (nval, ngrad) = self.num.eval_grad(p);
        let scale = if self.expo.is_zero() {
            Complex64::new(1.0, 0.0)
        } else {
            self.expo.eval(p).exp()
        };
        let value = nval / dval * scale;
        let nvars = self.dims().nvars();
        let mut grad = vec![Complex64::new(0.0, 0.0); nvars];
        let egrad = if self.expo.is_zero() {
            None
        } else {
            Some(self.expo.eval_grad(p).1)
        };
        for idx in 0..nvars {
            let mut g = (ngrad[idx] * dval - nval * dgrad[idx]) / (dval * dval) * scale;
            if let Some(eg) = &egrad {
                g += value * eg[idx];
            }
            grad[idx] = g;
        }
        Ok((value, grad))
    }

    /// Substitute fiber coordinates in all three parts; see
    /// [`WirtingerPoly::substitute_fiber`].
    pub fn substitute_fiber(&self, images: &[WirtingerPoly]) -> CoeffFn {
        let den = self.den.substitute_fiber(images);
        assert!(!den.is_zero(), "substitution collapsed a denominator");
        CoeffFn {
            num: self.num.substitute_fiber(images),
            den,
            expo: self.expo.substitute_fiber(images),
        }
        .canonicalized()
    }

    /// Semantic equality: cross-multiplied numerators must agree as
    /// polynomials and the exponential parts must match structurally.
    /// Polynomials form an integral domain, so no GCD reduction is
    /// needed for the comparison to be exact.
    pub fn semantic_eq(&self, other: &CoeffFn) -> bool {
        if self.is_zero() && other.is_zero() {
            return true;
        }
        if self.is_zero() != other.is_zero() {
            return false;
        }
        self.expo == other.expo && self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl From<WirtingerPoly> for CoeffFn {
    fn from(num: WirtingerPoly) -> Self {
        let dims = num.dims();
        CoeffFn {
            num,
            den: WirtingerPoly::one(dims),
            expo: WirtingerPoly::zero(dims),
        }
    }
}

impl std::fmt::Display for CoeffFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})", self.num)?;
        if self.den.constant_value() != Some(Complex64::new(1.0, 0.0)) {
            write!(f, " / ({})", self.den)?;
        }
        if !self.expo.is_zero() {
            write!(f, " * exp({})", self.expo)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn d11() -> Dims {
        Dims::new(1, 1)
    }

    fn s() -> WirtingerPoly {
        WirtingerPoly::variable(d11(), Var::S(0))
    }

    fn sb() -> WirtingerPoly {
        WirtingerPoly::variable(d11(), Var::SBar(0))
    }

    #[test]
    fn quotient_rule_for_fubini_study_potential() {
        // f = s / (1 + s sb): f_s = 1 / (1 + s sb)^2 and
        // f_sb = -s^2 / (1 + s sb)^2.
        let one = WirtingerPoly::one(d11());
        let den = one.add(&s().mul(&sb()));
        let f = CoeffFn::rational(s(), den.clone());
        let den2 = den.mul(&den);
        let fs = f.wirtinger_derive(Var::S(0));
        assert!(fs.semantic_eq(&CoeffFn::rational(one.clone(), den2.clone())));
        let fsb = f.wirtinger_derive(Var::SBar(0));
        assert!(fsb.semantic_eq(&CoeffFn::rational(s().mul(&s()).neg(), den2)));
    }

    #[test]
    fn exponential_derivative_reproduces_itself() {
        // d/ds exp(s + sb) = exp(s + sb)
        let f = CoeffFn::exponential(WirtingerPoly::one(d11()), s().add(&sb()));
        let fs = f.wirtinger_derive(Var::S(0));
        assert!(fs.semantic_eq(&f));
        let p = ChartPoint::new(d11(), vec![c(0.25, -1.5)], vec![c(0.0, 0.0)]);
        let expect = (p.s[0] + p.s[0].conj()).exp();
        assert!((f.eval(&p).unwrap() - expect).norm() < 1e-12);
    }

    #[test]
    fn recip_cancels_exponentials_in_products() {
        let q = CoeffFn::exponential(s().add(&WirtingerPoly::one(d11())), s().add(&sb()));
        let prod = q.mul(&q.recip().unwrap());
        assert!(prod.semantic_eq(&CoeffFn::one(d11())));
        assert!(prod.expo().is_zero(), "exponential parts cancel exactly");
    }

    #[test]
    fn zero_is_compatible_with_any_exponential_part() {
        let e = CoeffFn::exponential(WirtingerPoly::one(d11()), s().add(&sb()));
        let z = CoeffFn::zero(d11());
        assert!(z.checked_add(&e).unwrap().semantic_eq(&e));
        assert!(e.checked_add(&z).unwrap().semantic_eq(&e));
        let cancel = e.sub(&e);
        assert!(cancel.is_zero());
        // A fully cancelled sum may again meet any exponential part.
        assert!(cancel
            .checked_add(&CoeffFn::one(d11()))
            .unwrap()
            .semantic_eq(&CoeffFn::one(d11())));
    }

    #[test]
    fn mismatched_exponentials_refuse_to_add() {
        let a = CoeffFn::exponential(WirtingerPoly::one(d11()), s());
        let b = CoeffFn::exponential(WirtingerPoly::one(d11()), sb());
        assert!(matches!(
            a.checked_add(&b),
            Err(ChartError::IncompatibleExponentials { .. })
        ));
    }

    #[test]
    fn shared_denominators_do_not_square() {
        let den = WirtingerPoly::one(d11()).add(&s().mul(&sb()));
        let a = CoeffFn::rational(s(), den.clone());
        let b = CoeffFn::rational(sb(), den.clone());
        let sum = a.add(&b);
        assert_eq!(sum.den(), &den);
        assert_eq!(sum.num(), &s().add(&sb()));
    }

    #[test]
    fn conj_evaluates_to_conjugate_values() {
        let den = WirtingerPoly::one(d11()).add(&s().mul(&s()));
        let f = CoeffFn::from_parts(s().add(&sb().scale(c(0.0, 2.0))), den, s().add(&sb()));
        let g = f.conj();
        let p = ChartPoint::new(d11(), vec![c(0.4, 0.7)], vec![c(1.0, -1.0)]);
        assert!((g.eval(&p).unwrap() - f.eval(&p).unwrap().conj()).norm() < 1e-12);
    }

    #[test]
    fn eval_grad_matches_symbolic_partials() {
        let den = WirtingerPoly::one(d11()).add(&s().mul(&sb()));
        let f = CoeffFn::from_parts(s().mul(&sb()).add(&WirtingerPoly::one(d11())), den, sb());
        let p = ChartPoint::new(d11(), vec![c(0.3, -0.2)], vec![c(0.9, 0.1)]);
        let (value, grad) = f.eval_grad(&p).unwrap();
        assert!((value - f.eval(&p).unwrap()).norm() < 1e-12);
        for var in Var::all(d11()) {
            let expect = f.wirtinger_derive(var).eval(&p).unwrap();
            assert!(
                (grad[var.flat(d11())] - expect).norm() < 1e-10,
                "partial in {}",
                var
            );
        }
    }

    #[test]
    fn denominator_zero_reports_the_point() {
        let f = CoeffFn::rational(WirtingerPoly::one(d11()), s());
        let p = ChartPoint::new(d11(), vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]);
        assert!(matches!(
            f.eval(&p),
            Err(ChartError::DenominatorVanishes { .. })
        ));
    }
}
