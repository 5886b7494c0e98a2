//! Polynomials in chart coordinates and their conjugates.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::dims::{ChartPoint, Dims, Var};

/// Exponent vector over the flat variable order.
///
/// Ordered by total degree first, then lexicographically. The map keyed
/// by this order gives every polynomial one canonical term sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Box<[u16]>);

impl Monomial {
    pub fn unit(nvars: usize) -> Self {
        Monomial(vec![0u16; nvars].into_boxed_slice())
    }

    pub fn var(idx: usize, nvars: usize) -> Self {
        let mut e = vec![0u16; nvars];
        e[idx] = 1;
        Monomial(e.into_boxed_slice())
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(&a, &b)| a.checked_add(b).expect("monomial degree overflow"))
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in the chart coordinates and their conjugates.
///
/// Terms with coefficient exactly zero are never stored, so structural
/// equality of the term maps is semantic equality of polynomials. No
/// epsilon pruning happens anywhere; cancellation is only recognized
/// when it is exact in `f64` arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct WirtingerPoly {
    dims: Dims,
    terms: BTreeMap<Monomial, Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl WirtingerPoly {
    pub fn zero(dims: Dims) -> Self {
        WirtingerPoly {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dims: Dims, c: Complex64) -> Self {
        let mut p = Self::zero(dims);
        if c != ZERO {
            p.terms.insert(Monomial::unit(dims.nvars()), c);
        }
        p
    }

    pub fn one(dims: Dims) -> Self {
        Self::constant(dims, Complex64::new(1.0, 0.0))
    }

    pub fn variable(dims: Dims, var: Var) -> Self {
        let mut p = Self::zero(dims);
        p.terms.insert(
            Monomial::var(var.flat(dims), dims.nvars()),
            Complex64::new(1.0, 0.0),
        );
        p
    }

    /// Build from raw `(exponents, coefficient)` pairs; repeated
    /// monomials accumulate.
    pub fn from_terms(dims: Dims, terms: impl IntoIterator<Item = (Vec<u16>, Complex64)>) -> Self {
        let mut p = Self::zero(dims);
        for (e, c) in terms {
            assert_eq!(e.len(), dims.nvars(), "exponent vector length");
            p.add_term(Monomial(e.into_boxed_slice()), c);
        }
        p
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.total_degree() == 0)
    }

    pub fn constant_value(&self) -> Option<Complex64> {
        if self.is_zero() {
            Some(ZERO)
        } else if self.is_constant() {
            self.terms.values().next().copied()
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// Largest exponent sum over the fiber variables `t, tb`.
    pub fn fiber_degree(&self) -> u32 {
        let lo = 2 * self.dims.m;
        self.terms
            .keys()
            .map(|m| m.0[lo..].iter().map(|&e| e as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn uses_var(&self, var: Var) -> bool {
        let idx = var.flat(self.dims);
        self.terms.keys().any(|m| m.0[idx] > 0)
    }

    /// True when no barred variable occurs.
    pub fn is_holomorphic(&self) -> bool {
        !Var::all(self.dims).any(|v| v.is_barred() && self.uses_var(v))
    }

    fn add_term(&mut self, mono: Monomial, c: Complex64) {
        if c == ZERO {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                let sum = *slot.get() + c;
                if sum == ZERO {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &WirtingerPoly) -> WirtingerPoly {
        assert_eq!(self.dims, other.dims, "polynomial chart dims");
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &WirtingerPoly) -> WirtingerPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> WirtingerPoly {
        WirtingerPoly {
            dims: self.dims,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> WirtingerPoly {
        if c == ZERO {
            return Self::zero(self.dims);
        }
        WirtingerPoly {
            dims: self.dims,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &WirtingerPoly) -> WirtingerPoly {
        assert_eq!(self.dims, other.dims, "polynomial chart dims");
        let mut out = Self::zero(self.dims);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> WirtingerPoly {
        let mut out = Self::one(self.dims);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                out = out.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Complex conjugate as a function on honest points: swaps each
    /// variable with its conjugate and conjugates the coefficients.
    pub fn conj(&self) -> WirtingerPoly {
        let dims = self.dims;
        let nvars = dims.nvars();
        let mut out = Self::zero(dims);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; nvars];
            for idx in 0..nvars {
                if m.0[idx] > 0 {
                    let swapped = Var::from_flat(idx, dims).conj().flat(dims);
                    e[swapped] = m.0[idx];
                }
            }
            out.add_term(Monomial(e.into_boxed_slice()), c.conj());
        }
        out
    }

    /// Wirtinger partial derivative with respect to one variable,
    /// treating its conjugate as independent.
    pub fn wirtinger_derive(&self, var: Var) -> WirtingerPoly {
        let idx = var.flat(self.dims);
        let mut out = Self::zero(self.dims);
        for (m, &c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut lowered = m.0.to_vec();
            lowered[idx] = e - 1;
            out.add_term(Monomial(lowered.into_boxed_slice()), c * (e as f64));
        }
        out
    }

    pub fn eval(&self, p: &ChartPoint) -> Complex64 {
        assert_eq!(self.dims, p.dims, "evaluation point dims");
        let vals = p.flat_values();
        let mut acc = ZERO;
        for (m, &c) in &self.terms {
            acc += c * mono_value(m, &vals);
        }
        acc
    }

    /// Value together with all Wirtinger partials at one point, in a
    /// single pass over the terms.
    pub fn eval_grad(&self, p: &ChartPoint) -> (Complex64, Vec<Complex64>) {
        assert_eq!(self.dims, p.dims, "evaluation point dims");
        let vals = p.flat_values();
        let nvars = vals.len();
        let mut value = ZERO;
        let mut grad = vec![ZERO; nvars];
        for (m, &c) in &self.terms {
            // Track the product of nonzero factors and the location of
            // zero factors so a single zero still yields its partial.
            let mut prod = Complex64::new(1.0, 0.0);
            let mut zero_at: Option<usize> = None;
            let mut zero_count = 0usize;
            for idx in 0..nvars {
                let e = m.0[idx];
                if e == 0 {
                    continue;
                }
                let v = vals[idx];
                if v == ZERO {
                    zero_count += 1;
                    if zero_count > 1 {
                        break;
                    }
                    zero_at = Some(idx);
                    if e > 1 {
                        // v^e and v^(e-1) both vanish.
                        zero_count += 1;
                        break;
                    }
                } else {
                    prod *= v.powu(e as u32);
                }
            }
            if zero_count > 1 {
                continue;
            }
            match zero_at {
                None => {
                    value += c * prod;
                    for idx in 0..nvars {
                        let e = m.0[idx];
                        if e > 0 {
                            grad[idx] += c * prod * (e as f64) / vals[idx];
                        }
                    }
                }
                Some(z) => {
                    // exponent at z is exactly 1 and the value is zero
                    grad[z] += c * prod;
                }
            }
        }
        (value, grad)
    }

    /// Substitute each fiber coordinate `t_k` by `images[k]` and each
    /// conjugate `tb_k` by the conjugate image. Base variables pass
    /// through, so the result lives on the same chart.
    pub fn substitute_fiber(&self, images: &[WirtingerPoly]) -> WirtingerPoly {
        let dims = self.dims;
        assert_eq!(images.len(), dims.r, "one image per fiber variable");
        for img in images {
            assert_eq!(img.dims(), dims, "image chart dims");
        }
        let bar_images: Vec<WirtingerPoly> = images.iter().map(|p| p.conj()).collect();
        let nvars = dims.nvars();
        let mut out = Self::zero(dims);
        for (m, &c) in &self.terms {
            let mut base = vec![0u16; nvars];
            base[..2 * dims.m].copy_from_slice(&m.0[..2 * dims.m]);
            let mut factor =
                WirtingerPoly::from_terms(dims, [(base, Complex64::new(1.0, 0.0))]).scale(c);
            for k in 0..dims.r {
                let et = m.0[2 * dims.m + k];
                if et > 0 {
                    factor = factor.mul(&images[k].pow(et as u32));
                }
                let eb = m.0[2 * dims.m + dims.r + k];
                if eb > 0 {
                    factor = factor.mul(&bar_images[k].pow(eb as u32));
                }
            }
            out = out.add(&factor);
        }
        out
    }
}

fn mono_value(m: &Monomial, vals: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (idx, &e) in m.0.iter().enumerate() {
        if e > 0 {
            acc *= vals[idx].powu(e as u32);
        }
    }
    acc
}

impl fmt::Display for WirtingerPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            for idx in 0..m.0.len() {
                let e = m.0[idx];
                if e == 1 {
                    write!(f, " {}", Var::from_flat(idx, self.dims))?;
                } else if e > 1 {
                    write!(f, " {}^{}", Var::from_flat(idx, self.dims), e)?;
                }
            }
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

    fn dims11() -> Dims {
        Dims::new(1, 1)
    }

    #[test]
    fn zero_coefficients_are_pruned() {
        let d = dims11();
        let s = WirtingerPoly::variable(d, Var::S(0));
        let diff = s.sub(&s);
        assert!(diff.is_zero());
        assert_eq!(diff, WirtingerPoly::zero(d));
    }

    #[test]
    fn graded_lex_orders_by_degree_first() {
        let d = Dims::new(1, 1);
        let s = Monomial::var(Var::S(0).flat(d), d.nvars());
        let t = Monomial::var(Var::T(0).flat(d), d.nvars());
        let s2 = s.mul(&s);
        assert!(t < s, "same degree falls back to lex, earlier variables rank higher");
        assert!(s < s2, "degree dominates");
        assert!(t < s2, "degree dominates across variables");
    }

    #[test]
    fn derivative_of_s_squared_sbar() {
        // d/ds (s^2 sb) = 2 s sb, d/dsb (s^2 sb) = s^2
        let d = dims11();
        let s = WirtingerPoly::variable(d, Var::S(0));
        let sb = WirtingerPoly::variable(d, Var::SBar(0));
        let p = s.mul(&s).mul(&sb);
        assert_eq!(
            p.wirtinger_derive(Var::S(0)),
            s.mul(&sb).scale(c(2.0, 0.0))
        );
        assert_eq!(p.wirtinger_derive(Var::SBar(0)), s.mul(&s));
        assert!(p.wirtinger_derive(Var::T(0)).is_zero());
    }

    #[test]
    fn conj_swaps_bars_and_conjugates_coefficients() {
        let d = dims11();
        let s = WirtingerPoly::variable(d, Var::S(0));
        let t = WirtingerPoly::variable(d, Var::T(0));
        let p = s.mul(&t).scale(c(0.0, 1.0));
        let q = p.conj();
        let sb = WirtingerPoly::variable(d, Var::SBar(0));
        let tb = WirtingerPoly::variable(d, Var::TBar(0));
        assert_eq!(q, sb.mul(&tb).scale(c(0.0, -1.0)));
        assert_eq!(q.conj(), p);
    }

    #[test]
    fn eval_uses_honest_conjugates() {
        let d = dims11();
        let s = WirtingerPoly::variable(d, Var::S(0));
        let sb = WirtingerPoly::variable(d, Var::SBar(0));
        let norm = s.mul(&sb);
        let p = ChartPoint::new(d, vec![c(3.0, 4.0)], vec![c(0.0, 0.0)]);
        assert_eq!(norm.eval(&p), c(25.0, 0.0));
    }

    #[test]
    fn eval_grad_matches_symbolic_derivatives() {
        let d = Dims::new(2, 1);
        let p = WirtingerPoly::from_terms(
            d,
            [
                (vec![2, 0, 1, 0, 0, 0], c(1.0, -2.0)),
                (vec![0, 1, 0, 0, 2, 1], c(3.0, 0.5)),
                (vec![0, 0, 0, 0, 1, 0], c(-1.0, 0.0)),
            ],
        );
        let pt = ChartPoint::new(
            d,
            vec![c(0.3, -0.7), c(1.2, 0.4)],
            vec![c(-0.5, 0.9)],
        );
        let (value, grad) = p.eval_grad(&pt);
        assert!((value - p.eval(&pt)).norm() < 1e-12);
        for var in Var::all(d) {
            let expect = p.wirtinger_derive(var).eval(&pt);
            assert!(
                (grad[var.flat(d)] - expect).norm() < 1e-12,
                "partial in {}",
                var
            );
        }
    }

    #[test]
    fn eval_grad_handles_zero_coordinates() {
        let d = dims11();
        let s = WirtingerPoly::variable(d, Var::S(0));
        let t = WirtingerPoly::variable(d, Var::T(0));
        let p = s.mul(&t).add(&t.mul(&t));
        let pt = ChartPoint::new(d, vec![c(2.0, 1.0)], vec![c(0.0, 0.0)]);
        let (value, grad) = p.eval_grad(&pt);
        assert_eq!(value, c(0.0, 0.0));
        assert_eq!(grad[Var::T(0).flat(d)], c(2.0, 1.0));
        assert_eq!(grad[Var::S(0).flat(d)], c(0.0, 0.0));
    }

    #[test]
    fn fiber_substitution_composes_polynomials() {
        // p(t) = t^2 + 1 under t -> t + s gives (t + s)^2 + 1.
        let d = dims11();
        let s = WirtingerPoly::variable(d, Var::S(0));
        let t = WirtingerPoly::variable(d, Var::T(0));
        let p = t.mul(&t).add(&WirtingerPoly::one(d));
        let image = t.add(&s);
        let got = p.substitute_fiber(std::slice::from_ref(&image));
        let want = image.mul(&image).add(&WirtingerPoly::one(d));
        assert_eq!(got, want);
    }

    #[test]
    fn fiber_substitution_tracks_conjugates() {
        // |t|^2 under t -> t + s becomes (t + s)(tb + sb).
        let d = dims11();
        let s = WirtingerPoly::variable(d, Var::S(0));
        let t = WirtingerPoly::variable(d, Var::T(0));
        let tb = WirtingerPoly::variable(d, Var::TBar(0));
        let p = t.mul(&tb);
        let image = t.add(&s);
        let got = p.substitute_fiber(std::slice::from_ref(&image));
        assert_eq!(got, image.mul(&image.conj()));
        let pt = ChartPoint::new(d, vec![c(0.5, -0.25)], vec![c(1.0, 2.0)]);
        let shifted = ChartPoint::new(d, vec![c(0.5, -0.25)], vec![c(1.5, 1.75)]);
        assert!((got.eval(&pt) - p.eval(&shifted)).norm() < 1e-12);
    }

    #[test]
    fn pow_by_squaring() {
        let d = dims11();
        let s = WirtingerPoly::variable(d, Var::S(0));
        let base = s.add(&WirtingerPoly::one(d));
        let mut by_mul = WirtingerPoly::one(d);
        for _ in 0..5 {
            by_mul = by_mul.mul(&base);
        }
        assert_eq!(base.pow(5), by_mul);
    }
}
