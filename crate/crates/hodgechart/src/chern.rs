//! Hermitian metric charts and the metric connection they induce.
//!
//! A pseudo-Kaehler form on the chart splits into blocks against the
//! frame `(ds_i, dt_k)` and its conjugate:
//!
//! ```text
//! omega = i [ sum A_kl dt_k ^ dtb_l  +  sum B_ij ds_i ^ dtb_j
//!           + sum conj(B_ij) dt_j ^ dsb_i  +  sum G_ij ds_i ^ dsb_j ]
//! ```
//!
//! Only `A`, `B`, `G` are stored; the mirror block is determined by
//! hermiticity. The metric connection is the unique almost connection
//! whose lifts are omega-orthogonal to the conjugate fiber directions,
//! which pins its vertical part to `-B A^{-1}`.

use num_complex::Complex64;
use std::collections::BTreeMap;

use crate::bundles::{ConnRepr, ConnectionChart, DBarChart};
use crate::error::ChartError;
use crate::symcore::{
    CMat, ChartPoint, CoeffFn, CoeffMat, Dims, HermitianFactor, MatJet, Var, WirtingerPoly,
};

/// Block data of a hermitian form on the chart. `a` is `r x r`
/// (fiber-fiber), `b` is `m x r` (base-fiber), `g` is `m x m`
/// (base-base) and optional because purely fiberwise constructions
/// never read it.
#[derive(Debug, Clone)]
pub struct MetricChart {
    dims: Dims,
    a: CoeffMat,
    b: CoeffMat,
    g: Option<CoeffMat>,
}

impl MetricChart {
    pub fn new(
        dims: Dims,
        a: CoeffMat,
        b: CoeffMat,
        g: Option<CoeffMat>,
    ) -> Result<Self, ChartError> {
        a.check_shape(dims.r, dims.r, "fiber-fiber metric block")?;
        b.check_shape(dims.m, dims.r, "base-fiber metric block")?;
        if !a.is_hermitian() {
            return Err(ChartError::NotHermitian {
                context: "fiber-fiber metric block",
            });
        }
        if let Some(g) = &g {
            g.check_shape(dims.m, dims.m, "base-base metric block")?;
            if !g.is_hermitian() {
                return Err(ChartError::NotHermitian {
                    context: "base-base metric block",
                });
            }
        }
        Ok(MetricChart { dims, a, b, g })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn a(&self) -> &CoeffMat {
        &self.a
    }

    pub fn b(&self) -> &CoeffMat {
        &self.b
    }

    pub fn g(&self) -> Option<&CoeffMat> {
        self.g.as_ref()
    }

    /// Positivity of the fiber block at a point.
    pub fn fiber_positive_at(&self, p: &ChartPoint) -> Result<bool, ChartError> {
        let a = self.a.eval(p)?;
        Ok(HermitianFactor::new(&a).is_some())
    }

    /// Positivity of the full `(m + r)`-square coefficient matrix
    /// `[[G, B], [B^H, A]]` at a point. Needs the base-base block.
    pub fn full_positive_at(&self, p: &ChartPoint) -> Result<bool, ChartError> {
        let g = self.g.as_ref().ok_or_else(|| {
            ChartError::invalid("full positivity needs the base-base metric block")
        })?;
        let (m, r) = (self.dims.m, self.dims.r);
        let av = self.a.eval(p)?;
        let bv = self.b.eval(p)?;
        let gv = g.eval(p)?;
        let mut full = CMat::zeros(m + r, m + r);
        full.view_mut((0, 0), (m, m)).copy_from(&gv);
        full.view_mut((0, m), (m, r)).copy_from(&bv);
        full.view_mut((m, 0), (r, m)).copy_from(&bv.adjoint());
        full.view_mut((m, m), (r, r)).copy_from(&av);
        Ok(HermitianFactor::new(&full).is_some())
    }

    /// Closed-form vertical coefficients of the metric connection,
    /// `-B A^{-1}`. Available when the fiber block is free of fiber
    /// coordinates, so its inverse stays inside the coefficient class.
    pub fn chern_symbolic(&self) -> Result<CoeffMat, ChartError> {
        if !self.a.is_fiber_free() {
            return Err(ChartError::UnsupportedMetric {
                context: "fiber-fiber block depends on fiber coordinates",
            });
        }
        let a_inv = self.a.inverse()?;
        Ok(self.b.mul(&a_inv).neg())
    }

    /// Value and first derivatives of `-B A^{-1}` at a point, one
    /// Cholesky factorization per point. `X = B A^{-1}` solves
    /// `X A = B`; differentiating, `X_v A = B_v - X A_v`.
    pub fn chern_jet(&self, p: &ChartPoint) -> Result<MatJet, ChartError> {
        let aj = self.a.eval_jet(p)?;
        let bj = self.b.eval_jet(p)?;
        let factor = HermitianFactor::new(&aj.value).ok_or_else(|| {
            ChartError::MetricDegenerate {
                s: p.s.clone(),
                t: p.t.clone(),
            }
        })?;
        let x = factor.solve_rows(&bj.value);
        let d = aj
            .d
            .iter()
            .zip(&bj.d)
            .map(|(av, bv)| -factor.solve_rows(&(bv - &x * av)))
            .collect();
        Ok(MatJet { value: -x, d })
    }

    /// Structural freedom of the metric connection coefficients from
    /// conjugate fiber variables.
    pub fn chern_is_tbar_free(&self) -> Result<bool, ChartError> {
        Ok(self.a.is_tbar_free() && self.b.is_tbar_free())
    }

    /// Exact closedness of the form: the exterior derivative is
    /// accumulated per wedge triple and every coefficient must cancel
    /// to the zero function. Needs the base-base block.
    pub fn is_closed(&self) -> Result<bool, ChartError> {
        let g = self.g.as_ref().ok_or_else(|| {
            ChartError::invalid("closedness needs the base-base metric block")
        })?;
        let dims = self.dims;
        let mut terms: Vec<(Var, Var, CoeffFn)> = Vec::new();
        for k in 0..dims.r {
            for l in 0..dims.r {
                terms.push((Var::T(k), Var::TBar(l), self.a.get(k, l).clone()));
            }
        }
        for i in 0..dims.m {
            for j in 0..dims.r {
                terms.push((Var::S(i), Var::TBar(j), self.b.get(i, j).clone()));
                terms.push((Var::T(j), Var::SBar(i), self.b.get(i, j).conj()));
            }
        }
        for i in 0..dims.m {
            for j in 0..dims.m {
                terms.push((Var::S(i), Var::SBar(j), g.get(i, j).clone()));
            }
        }

        let mut accum: BTreeMap<[usize; 3], CoeffFn> = BTreeMap::new();
        for (v, w, f) in &terms {
            if f.is_zero() {
                continue;
            }
            for u in Var::all(dims) {
                if u == *v || u == *w {
                    continue;
                }
                let df = f.wirtinger_derive(u);
                if df.is_zero() {
                    continue;
                }
                let (key, sign) = sort_triple([u.flat(dims), v.flat(dims), w.flat(dims)]);
                let signed = if sign < 0 { df.neg() } else { df };
                let slot = accum
                    .remove(&key)
                    .unwrap_or_else(|| CoeffFn::zero(dims));
                let sum = slot.checked_add(&signed).map_err(|_| {
                    ChartError::IncompatibleExponentials {
                        context: "exterior derivative accumulation",
                    }
                })?;
                accum.insert(key, sum);
            }
        }
        Ok(accum.values().all(|f| f.is_zero()))
    }
}

/// Sorts three distinct indices, returning the permutation sign.
fn sort_triple(mut t: [usize; 3]) -> ([usize; 3], i32) {
    let mut sign = 1;
    if t[0] > t[1] {
        t.swap(0, 1);
        sign = -sign;
    }
    if t[1] > t[2] {
        t.swap(1, 2);
        sign = -sign;
    }
    if t[0] > t[1] {
        t.swap(0, 1);
        sign = -sign;
    }
    (t, sign)
}

/// The form `i del delbar (sum h_kl t_k tb_l)` of a hermitian matrix
/// `h(s, sb)` on the fibers:
///
/// ```text
/// A_kl = h_kl
/// B_ij = sum_k t_k d h_kj / d s_i
/// G_ij = sum_kl t_k tb_l d^2 h_kl / (d s_i d sb_j)
/// ```
pub fn metric_from_linear_hermitian(dims: Dims, h: &CoeffMat) -> Result<MetricChart, ChartError> {
    h.check_shape(dims.r, dims.r, "fiberwise hermitian matrix")?;
    if !h.is_fiber_free() {
        return Err(ChartError::UnsupportedMetric {
            context: "fiberwise hermitian matrix must not depend on fiber coordinates",
        });
    }
    if !h.is_hermitian() {
        return Err(ChartError::NotHermitian {
            context: "fiberwise hermitian matrix",
        });
    }

    let t = |k: usize| WirtingerPoly::variable(dims, Var::T(k));
    let tb = |k: usize| WirtingerPoly::variable(dims, Var::TBar(k));

    let mut b = CoeffMat::zeros(dims, dims.m, dims.r);
    for i in 0..dims.m {
        for j in 0..dims.r {
            let mut acc = CoeffFn::zero(dims);
            for k in 0..dims.r {
                let d = h.get(k, j).wirtinger_derive(Var::S(i));
                acc = acc.checked_add(&d.mul_poly(&t(k))).map_err(|_| {
                    ChartError::IncompatibleExponentials {
                        context: "base-fiber block assembly",
                    }
                })?;
            }
            b.set(i, j, acc);
        }
    }

    let mut g = CoeffMat::zeros(dims, dims.m, dims.m);
    for i in 0..dims.m {
        for j in 0..dims.m {
            let mut acc = CoeffFn::zero(dims);
            for k in 0..dims.r {
                for l in 0..dims.r {
                    let d2 = h
                        .get(k, l)
                        .wirtinger_derive(Var::S(i))
                        .wirtinger_derive(Var::SBar(j));
                    let term = d2.mul_poly(&t(k).mul(&tb(l)));
                    acc = acc.checked_add(&term).map_err(|_| {
                        ChartError::IncompatibleExponentials {
                            context: "base-base block assembly",
                        }
                    })?;
                }
            }
            g.set(i, j, acc);
        }
    }

    MetricChart::new(dims, h.clone(), b, Some(g))
}

/// The metric connection of a del-bar chart: the unique lift family
/// orthogonal to the conjugate fiber directions. Its vertical part is
/// `-B A^{-1}`, evaluated pointwise; the conjugate vertical part is
/// forced to `conj(u)` by membership in the graph distribution.
pub fn chern_connection(
    metric: MetricChart,
    dbar: DBarChart,
) -> Result<ConnectionChart, ChartError> {
    metric.dims().check_eq(dbar.dims(), "metric connection inputs")?;
    let dims = metric.dims();
    Ok(ConnectionChart::from_repr(
        dims,
        ConnRepr::Chern {
            metric: Box::new(metric),
            dbar,
        },
    ))
}

/// Largest entry of `C A + B` over the sample points: the defining
/// orthogonality of the metric connection, checked numerically.
pub fn orthogonality_residual(
    conn: &ConnectionChart,
    metric: &MetricChart,
    points: &[ChartPoint],
) -> Result<f64, ChartError> {
    let mut sup: f64 = 0.0;
    for p in points {
        let (cj, _) = conn.jet(p)?;
        let a = metric.a().eval(p)?;
        let b = metric.b().eval(p)?;
        let res = &cj.value * &a + &b;
        sup = sup.max(res.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(sup)
}

/// Checks the inputs of the two projective routes: a `2 x 2` hermitian
/// matrix of base-only coefficients over a chart with a line fiber.
fn check_projective_input(h: &CoeffMat) -> Result<Dims, ChartError> {
    let dims = h.dims();
    h.check_shape(2, 2, "projective fiber metric")?;
    if dims.m != 1 || dims.r != 1 {
        return Err(ChartError::invalid(
            "projective routes use one base variable and one fiber variable",
        ));
    }
    if !h.is_fiber_free() {
        return Err(ChartError::UnsupportedMetric {
            context: "projective fiber metric must not depend on the fiber coordinate",
        });
    }
    if !h.is_hermitian() {
        return Err(ChartError::NotHermitian {
            context: "projective fiber metric",
        });
    }
    Ok(dims)
}

/// Vertical coefficient of the metric connection on the
/// projectivization of a rank-two bundle, via the connection matrix:
/// with `a = (d_s h) h^{-1}`, the coefficient in the affine fiber
/// coordinate `x` is the quadratic
///
/// ```text
/// Q(x) = -a_12 x^2 + (a_11 - a_22) x + a_21
/// ```
pub fn fubini_study_matrix_route(h: &CoeffMat) -> Result<CoeffFn, ChartError> {
    let dims = check_projective_input(h)?;
    let a = h.derive(Var::S(0)).mul(&h.inverse()?);
    let x = WirtingerPoly::variable(dims, Var::T(0));
    let x2 = x.mul(&x);

    let mismatch = |_| ChartError::IncompatibleExponentials {
        context: "projective coefficient assembly",
    };
    let mut q = a.get(0, 1).neg().mul_poly(&x2);
    let linear = a.get(0, 0).sub(a.get(1, 1)).mul_poly(&x);
    q = q.checked_add(&linear).map_err(mismatch)?;
    q = q.checked_add(a.get(1, 0)).map_err(mismatch)?;
    Ok(q)
}

/// The same coefficient read off the induced form on the projective
/// chart: with the fiberwise potential
/// `f = |x|^2 h_11 + x h_12 + xb h_21 + h_22`, the form coefficients
/// are second log-derivatives of `f` and the result is the pointwise
/// ratio of the mixed and vertical components.
pub fn fubini_study_form_route(h: &CoeffMat, p: &ChartPoint) -> Result<Complex64, ChartError> {
    check_projective_input(h)?;
    let hv = h.eval(p)?;
    let hs = h.derive(Var::S(0)).eval(p)?;
    let x = p.t[0];
    let xb = x.conj();

    let f = x * xb * hv[(0, 0)] + x * hv[(0, 1)] + xb * hv[(1, 0)] + hv[(1, 1)];
    let f_x = xb * hv[(0, 0)] + hv[(0, 1)];
    let f_xb = x * hv[(0, 0)] + hv[(1, 0)];
    let f_xxb = hv[(0, 0)];
    let f_s = x * xb * hs[(0, 0)] + x * hs[(0, 1)] + xb * hs[(1, 0)] + hs[(1, 1)];
    let f_sxb = x * hs[(0, 0)] + hs[(1, 0)];

    if f.norm() < 1e-12 {
        return Err(ChartError::MetricDegenerate {
            s: p.s.clone(),
            t: p.t.clone(),
        });
    }
    let f2 = f * f;
    let omega_xxb = (f * f_xxb - f_x * f_xb) / f2;
    let omega_sxb = (f * f_sxb - f_s * f_xb) / f2;
    if omega_xxb.norm() < 1e-12 {
        return Err(ChartError::MetricDegenerate {
            s: p.s.clone(),
            t: p.t.clone(),
        });
    }
    Ok(omega_sxb / omega_xxb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::{canonical_dbar, FiberChart};
    use crate::symcore::PointSampler;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `[[1 + s sb, s], [sb, 2]]`: positive definite everywhere.
    fn sample_h(dims: Dims) -> CoeffMat {
        let s = WirtingerPoly::variable(dims, Var::S(0));
        let sb = WirtingerPoly::variable(dims, Var::SBar(0));
        let one = WirtingerPoly::one(dims);
        CoeffMat::from_polys(
            dims,
            2,
            2,
            vec![
                one.add(&s.mul(&sb)),
                s.clone(),
                sb,
                WirtingerPoly::constant(dims, c(2.0, 0.0)),
            ],
        )
    }

    #[test]
    fn linear_metric_blocks_match_hand_derivatives() {
        let dims = Dims::new(1, 2);
        let metric = metric_from_linear_hermitian(dims, &sample_h(dims)).unwrap();
        // B = [sb t1, t1], G = [t1 tb1]
        let sb = WirtingerPoly::variable(dims, Var::SBar(0));
        let t1 = WirtingerPoly::variable(dims, Var::T(0));
        let tb1 = WirtingerPoly::variable(dims, Var::TBar(0));
        assert!(metric
            .b()
            .get(0, 0)
            .semantic_eq(&CoeffFn::from(sb.mul(&t1))));
        assert!(metric.b().get(0, 1).semantic_eq(&CoeffFn::from(t1.clone())));
        assert!(metric
            .g()
            .unwrap()
            .get(0, 0)
            .semantic_eq(&CoeffFn::from(t1.mul(&tb1))));
    }

    #[test]
    fn induced_form_is_closed() {
        let dims = Dims::new(1, 2);
        let metric = metric_from_linear_hermitian(dims, &sample_h(dims)).unwrap();
        assert!(metric.is_closed().unwrap());
    }

    #[test]
    fn hand_built_nonpotential_form_is_not_closed() {
        let dims = Dims::new(1, 1);
        let a = CoeffMat::identity(dims, 1);
        let mut b = CoeffMat::zeros(dims, 1, 1);
        b.set(0, 0, CoeffFn::variable(dims, Var::SBar(0)));
        let g = CoeffMat::zeros(dims, 1, 1);
        let metric = MetricChart::new(dims, a, b, Some(g)).unwrap();
        assert!(!metric.is_closed().unwrap());
    }

    #[test]
    fn connection_lifts_are_orthogonal_to_conjugate_fibers() {
        let dims = Dims::new(1, 2);
        let metric = metric_from_linear_hermitian(dims, &sample_h(dims)).unwrap();
        let dbar = canonical_dbar(&FiberChart::new(dims, "orthogonality"));
        let conn = chern_connection(metric.clone(), dbar).unwrap();
        let points = PointSampler::new(dims, 7).points(12, 0.6);
        let sup = orthogonality_residual(&conn, &metric, &points).unwrap();
        assert!(sup < 1e-12, "residual {sup}");

        // symbolic route agrees with the pointwise jets
        let c_sym = conn.symbolic_c().unwrap();
        for p in &points {
            let (cj, _) = conn.jet(p).unwrap();
            let cv = c_sym.eval(p).unwrap();
            assert!((cv - cj.value).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
        }
    }

    #[test]
    fn diagonal_exponential_metric_has_linear_vertical_part() {
        // h = diag(e^(s + sb), 1): C = (-t1, 0) exactly.
        let dims = Dims::new(1, 2);
        let s = WirtingerPoly::variable(dims, Var::S(0));
        let sb = WirtingerPoly::variable(dims, Var::SBar(0));
        let expo = s.add(&sb);
        let mut h = CoeffMat::zeros(dims, 2, 2);
        h.set(0, 0, CoeffFn::exponential(WirtingerPoly::one(dims), expo));
        h.set(1, 1, CoeffFn::one(dims));
        let metric = metric_from_linear_hermitian(dims, &h).unwrap();
        let c_sym = metric.chern_symbolic().unwrap();
        let t1 = CoeffFn::variable(dims, Var::T(0));
        assert!(c_sym.get(0, 0).semantic_eq(&t1.neg()));
        assert!(c_sym.get(0, 1).is_zero());
        assert!(metric.is_closed().unwrap());
    }

    #[test]
    fn fiber_dependent_block_has_no_closed_form() {
        let dims = Dims::new(1, 1);
        let mut a = CoeffMat::identity(dims, 1);
        let t = WirtingerPoly::variable(dims, Var::T(0));
        let tb = WirtingerPoly::variable(dims, Var::TBar(0));
        a.set(
            0,
            0,
            CoeffFn::from(WirtingerPoly::one(dims).add(&t.mul(&tb))),
        );
        let b = CoeffMat::zeros(dims, 1, 1);
        let metric = MetricChart::new(dims, a, b, None).unwrap();
        assert!(matches!(
            metric.chern_symbolic(),
            Err(ChartError::UnsupportedMetric { .. })
        ));
    }

    #[test]
    fn projective_routes_agree_on_a_diagonal_metric() {
        // h = diag(e^(s + sb), 1): both routes give x, value 1 at
        // (s, x) = (0, 1).
        let dims = Dims::new(1, 1);
        let s = WirtingerPoly::variable(dims, Var::S(0));
        let sb = WirtingerPoly::variable(dims, Var::SBar(0));
        let mut h = CoeffMat::zeros(dims, 2, 2);
        h.set(0, 0, CoeffFn::exponential(WirtingerPoly::one(dims), s.add(&sb)));
        h.set(1, 1, CoeffFn::one(dims));

        let q = fubini_study_matrix_route(&h).unwrap();
        assert!(q.semantic_eq(&CoeffFn::variable(dims, Var::T(0))));

        let p = ChartPoint::new(dims, vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]);
        let v = fubini_study_form_route(&h, &p).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn projective_routes_agree_on_an_off_diagonal_metric() {
        // h = [[2 + s sb, s], [sb, 1]], det = 2 > 0.
        let dims = Dims::new(1, 1);
        let s = WirtingerPoly::variable(dims, Var::S(0));
        let sb = WirtingerPoly::variable(dims, Var::SBar(0));
        let two = WirtingerPoly::constant(dims, c(2.0, 0.0));
        let h = CoeffMat::from_polys(
            dims,
            2,
            2,
            vec![two.add(&s.mul(&sb)), s.clone(), sb, WirtingerPoly::one(dims)],
        );
        let q = fubini_study_matrix_route(&h).unwrap();
        let mut sampler = PointSampler::new(dims, 99);
        for _ in 0..12 {
            let p = sampler.point(0.8);
            let via_matrix = q.eval(&p).unwrap();
            let via_form = fubini_study_form_route(&h, &p).unwrap();
            assert!(
                (via_matrix - via_form).norm() < 1e-9,
                "routes differ: {via_matrix} vs {via_form}"
            );
        }
    }
}
