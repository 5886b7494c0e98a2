//! The transform between Higgs data and flat data over a fixed metric.
//!
//! Fix a metric chart and a comparison map `beta` acting on vertical
//! frames. Higgs data `(theta, dbar_g)` maps to flat data: a new
//! del-bar operator whose coefficients are
//!
//! ```text
//! U = (U_g + conj-rows(theta)) Q^{-1}
//! ```
//!
//! and the almost connection `nabla = del_omega - beta^{-1} theta`,
//! where `del_omega` is the metric connection over the new del-bar
//! operator. The backward transform recovers the Higgs field as
//! `theta = beta (del_omega - nabla)` and the del-bar operator as
//! `beta dbar_f - conj-rows(theta)`. Both compositions return their
//! input exactly at the level of coefficient functions; the round trip
//! never needs to evaluate anything.

use crate::bundles::{ConnRepr, ConnectionChart, DBarChart, HiggsChart, Polarity};
use crate::chern::MetricChart;
use crate::conjugation::{conjugate_higgs, RealFormSpec};
use crate::error::ChartError;
use crate::symcore::{ChartPoint, CoeffMat, Dims};

/// A comparison automorphism of the vertical frame: either the
/// identity or a fiberwise linear map `d/dt_k -> sum_l Q_kl d/dt_l`
/// with base-only invertible coefficient matrix.
#[derive(Debug, Clone)]
pub enum BetaMap {
    Identity { dims: Dims },
    VerticalLinear { q: CoeffMat },
}

impl BetaMap {
    pub fn identity(dims: Dims) -> Self {
        BetaMap::Identity { dims }
    }

    pub fn vertical_linear(dims: Dims, q: CoeffMat) -> Result<Self, ChartError> {
        q.check_shape(dims.r, dims.r, "comparison map matrix")?;
        if !q.is_fiber_free() {
            return Err(ChartError::BetaCheckFailed {
                context: "comparison map matrix must not depend on fiber coordinates".into(),
            });
        }
        if q.det().is_zero() {
            return Err(ChartError::SingularMatrix {
                what: "comparison map matrix",
            });
        }
        Ok(BetaMap::VerticalLinear { q })
    }

    pub fn dims(&self) -> Dims {
        match self {
            BetaMap::Identity { dims } => *dims,
            BetaMap::VerticalLinear { q } => q.dims(),
        }
    }

    /// Right-multiply row data by the frame matrix.
    pub fn apply_rows(&self, rows: &CoeffMat) -> CoeffMat {
        match self {
            BetaMap::Identity { .. } => rows.clone(),
            BetaMap::VerticalLinear { q } => rows.mul(q),
        }
    }

    /// Right-multiply row data by the inverse frame matrix.
    pub fn apply_inv_rows(&self, rows: &CoeffMat) -> Result<CoeffMat, ChartError> {
        match self {
            BetaMap::Identity { .. } => Ok(rows.clone()),
            BetaMap::VerticalLinear { q } => Ok(rows.mul(&q.inverse()?)),
        }
    }

    /// Largest deviation of the form under the frame map over the
    /// sample points: `Q A Q^H = A` on the fiber block and
    /// `B Q^H = B` on the mixed block.
    pub fn form_preservation_residual(
        &self,
        metric: &MetricChart,
        points: &[ChartPoint],
    ) -> Result<f64, ChartError> {
        let mut sup: f64 = 0.0;
        let qm = match self {
            BetaMap::Identity { .. } => return Ok(0.0),
            BetaMap::VerticalLinear { q } => q,
        };
        for p in points {
            let q = qm.eval(p)?;
            let a = metric.a().eval(p)?;
            let b = metric.b().eval(p)?;
            let ra = &q * &a * q.adjoint() - &a;
            let rb = &b * q.adjoint() - &b;
            sup = sup.max(ra.iter().map(|z| z.norm()).fold(0.0, f64::max));
            sup = sup.max(rb.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
        Ok(sup)
    }

    /// Hard check used by allowability: fails loudly when the frame
    /// map moves the form.
    pub fn check_preserves_form(
        &self,
        metric: &MetricChart,
        points: &[ChartPoint],
        tol: f64,
    ) -> Result<(), ChartError> {
        let res = self.form_preservation_residual(metric, points)?;
        if res > tol {
            return Err(ChartError::BetaCheckFailed {
                context: format!("form preservation residual {res:.3e} exceeds {tol:.1e}"),
            });
        }
        Ok(())
    }
}

/// Flat-side output of the forward transform.
#[derive(Debug, Clone)]
pub struct SimpsonFlat {
    /// Del-bar operator of the flat side.
    pub dbar: DBarChart,
    /// The metric connection over `dbar`, kept for reports.
    pub chern: ConnectionChart,
    /// The almost connection completing the flat pair.
    pub nabla: ConnectionChart,
}

/// Higgs-side output of the backward transform.
#[derive(Debug, Clone)]
pub struct SimpsonHiggs {
    pub theta: HiggsChart,
    /// Del-bar operator of the Higgs side.
    pub dbar: DBarChart,
}

/// Forward transform: Higgs data over `dbar_g` to flat data.
pub fn higgs_to_flat(
    theta: &HiggsChart,
    dbar_g: &DBarChart,
    metric: &MetricChart,
    beta: &BetaMap,
    realform: &RealFormSpec,
) -> Result<SimpsonFlat, ChartError> {
    let dims = theta.dims();
    dims.check_eq(dbar_g.dims(), "transform inputs")?;
    dims.check_eq(metric.dims(), "transform inputs")?;
    dims.check_eq(beta.dims(), "transform inputs")?;
    if theta.polarity() != Polarity::Holomorphic {
        return Err(ChartError::invalid(
            "forward transform expects a field paired with the holomorphic base frame",
        ));
    }

    let theta_bar = conjugate_higgs(theta, metric, realform)?;
    let u_out = beta.apply_inv_rows(&dbar_g.u().add(theta_bar.theta()))?;
    let dbar = DBarChart::new(dims, u_out)?;

    let chern = ConnectionChart::from_repr(
        dims,
        ConnRepr::Chern {
            metric: Box::new(metric.clone()),
            dbar: dbar.clone(),
        },
    );
    let extra = beta.apply_inv_rows(theta.theta())?.neg();
    let nabla = ConnectionChart::from_repr(
        dims,
        ConnRepr::ChernPlus {
            metric: Box::new(metric.clone()),
            dbar: dbar.clone(),
            extra,
        },
    );

    Ok(SimpsonFlat { dbar, chern, nabla })
}

/// Backward transform: a flat pair to Higgs data. When the connection
/// is the metric connection plus an explicit shift over the same
/// metric, the metric parts cancel without ever forming them; the
/// general route subtracts closed forms and therefore needs a
/// fiber-free fiber block.
pub fn flat_to_higgs(
    nabla: &ConnectionChart,
    dbar_f: &DBarChart,
    metric: &MetricChart,
    beta: &BetaMap,
    realform: &RealFormSpec,
) -> Result<SimpsonHiggs, ChartError> {
    let dims = nabla.dims();
    dims.check_eq(dbar_f.dims(), "transform inputs")?;
    dims.check_eq(metric.dims(), "transform inputs")?;
    dims.check_eq(beta.dims(), "transform inputs")?;

    let diff = match nabla.repr() {
        ConnRepr::ChernPlus {
            metric: m2, extra, ..
        } if m2.a().semantic_eq(metric.a()) && m2.b().semantic_eq(metric.b()) => extra.neg(),
        _ => metric.chern_symbolic()?.sub(&nabla.symbolic_c()?),
    };
    let rows = beta.apply_rows(&diff);
    let theta = if rows.is_holomorphic() {
        HiggsChart::new_holomorphic(dims, rows)?
    } else {
        HiggsChart::new_almost(dims, rows)?
    };

    let theta_bar = conjugate_higgs(&theta, metric, realform)?;
    let u_out = beta.apply_rows(dbar_f.u()).sub(theta_bar.theta());
    let dbar = DBarChart::new(dims, u_out)?;

    Ok(SimpsonHiggs { theta, dbar })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::{canonical_dbar, FiberChart};
    use crate::chern::metric_from_linear_hermitian;
    use crate::symcore::{CoeffFn, PointSampler, Var, WirtingerPoly};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Uniformizing-type data: h = diag(q, 1/q) with q = -i(s - sb),
    /// theta rows = t . [[0, 1], [0, 0]].
    fn uniformizing(dims: Dims) -> (HiggsChart, MetricChart) {
        let s = WirtingerPoly::variable(dims, Var::S(0));
        let sb = WirtingerPoly::variable(dims, Var::SBar(0));
        let q = s.sub(&sb).scale(c(0.0, -1.0));
        let mut h = CoeffMat::zeros(dims, 2, 2);
        h.set(0, 0, CoeffFn::from(q.clone()));
        h.set(1, 1, CoeffFn::rational(WirtingerPoly::one(dims), q));
        let metric = metric_from_linear_hermitian(dims, &h).unwrap();

        let mut mat = CoeffMat::zeros(dims, 2, 2);
        mat.set(0, 1, CoeffFn::one(dims));
        let theta =
            HiggsChart::from_linear_matrices(dims, &[mat], Polarity::Holomorphic).unwrap();
        (theta, metric)
    }

    #[test]
    fn uniformizing_data_round_trips_exactly() {
        let dims = Dims::new(1, 2);
        let (theta, metric) = uniformizing(dims);
        let dbar_g = canonical_dbar(&FiberChart::new(dims, "uniformizing"));
        let beta = BetaMap::identity(dims);
        let rf = RealFormSpec::LinearUnitary;

        let flat = higgs_to_flat(&theta, &dbar_g, &metric, &beta, &rf).unwrap();
        // the conjugate field feeds the new del-bar coefficients
        assert!(!flat.dbar.u().is_zero());

        let back = flat_to_higgs(&flat.nabla, &flat.dbar, &metric, &beta, &rf).unwrap();
        assert!(back.theta.theta().semantic_eq(theta.theta()));
        assert!(back.theta.is_holomorphic());
        assert!(back.dbar.u().semantic_eq(dbar_g.u()));
    }

    #[test]
    fn round_trip_survives_a_polynomial_frame_map() {
        let dims = Dims::new(1, 2);
        let s = WirtingerPoly::variable(dims, Var::S(0));

        let h = CoeffMat::from_constants(
            dims,
            2,
            2,
            &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)],
        );
        let metric = metric_from_linear_hermitian(dims, &h).unwrap();

        let mut mat = CoeffMat::zeros(dims, 2, 2);
        mat.set(0, 0, CoeffFn::from(s.clone()));
        mat.set(0, 1, CoeffFn::constant(dims, c(1.0, 1.0)));
        mat.set(1, 0, CoeffFn::from(s.mul(&s)));
        let theta =
            HiggsChart::from_linear_matrices(dims, &[mat], Polarity::Holomorphic).unwrap();

        // unit determinant shear, polynomial inverse
        let mut q = CoeffMat::identity(dims, 2);
        q.set(0, 1, CoeffFn::from(s.clone()));
        let beta = BetaMap::vertical_linear(dims, q).unwrap();

        let mut u_g = CoeffMat::zeros(dims, 1, 2);
        u_g.set(
            0,
            0,
            CoeffFn::variable(dims, Var::SBar(0)).mul(&CoeffFn::variable(dims, Var::T(1))),
        );
        let dbar_g = DBarChart::new(dims, u_g).unwrap();

        let rf = RealFormSpec::LinearUnitary;
        let flat = higgs_to_flat(&theta, &dbar_g, &metric, &beta, &rf).unwrap();
        let back = flat_to_higgs(&flat.nabla, &flat.dbar, &metric, &beta, &rf).unwrap();
        assert!(back.theta.theta().semantic_eq(theta.theta()));
        assert!(back.dbar.u().semantic_eq(dbar_g.u()));
    }

    #[test]
    fn reverse_round_trip_recovers_flat_data() {
        let dims = Dims::new(1, 2);
        let t1 = WirtingerPoly::variable(dims, Var::T(0));
        let t2 = WirtingerPoly::variable(dims, Var::T(1));

        // constant metric: the metric connection vanishes
        let h = CoeffMat::from_constants(
            dims,
            2,
            2,
            &[c(3.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(2.0, 0.0)],
        );
        let metric = metric_from_linear_hermitian(dims, &h).unwrap();

        let mut cmat = CoeffMat::zeros(dims, 1, 2);
        cmat.set(0, 0, CoeffFn::from(t1.scale(c(1.0, 0.0)).add(&t2.scale(c(0.0, 2.0)))));
        cmat.set(0, 1, CoeffFn::from(t1.scale(c(-1.0, 1.0))));
        let nabla = ConnectionChart::explicit(dims, cmat.clone()).unwrap();

        let mut u_f = CoeffMat::zeros(dims, 1, 2);
        u_f.set(0, 1, CoeffFn::from(t2.scale(c(2.0, -1.0))));
        let dbar_f = DBarChart::new(dims, u_f.clone()).unwrap();

        let mut q = CoeffMat::identity(dims, 2);
        q.set(1, 0, CoeffFn::variable(dims, Var::S(0)));
        let beta = BetaMap::vertical_linear(dims, q).unwrap();
        let rf = RealFormSpec::LinearUnitary;

        let higgs = flat_to_higgs(&nabla, &dbar_f, &metric, &beta, &rf).unwrap();
        let flat = higgs_to_flat(&higgs.theta, &higgs.dbar, &metric, &beta, &rf).unwrap();

        assert!(flat.dbar.u().semantic_eq(&u_f));
        assert!(flat.nabla.symbolic_c().unwrap().semantic_eq(&cmat));
    }

    #[test]
    fn changing_the_field_shifts_the_connection_by_the_inverse_frame_map() {
        let dims = Dims::new(1, 2);
        let s = WirtingerPoly::variable(dims, Var::S(0));
        let h = CoeffMat::from_constants(
            dims,
            2,
            2,
            &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        );
        let metric = metric_from_linear_hermitian(dims, &h).unwrap();
        let dbar_g = canonical_dbar(&FiberChart::new(dims, "torsor"));
        let mut q = CoeffMat::identity(dims, 2);
        q.set(0, 1, CoeffFn::from(s.clone()));
        let beta = BetaMap::vertical_linear(dims, q.clone()).unwrap();
        let rf = RealFormSpec::LinearUnitary;

        let mut m1 = CoeffMat::zeros(dims, 2, 2);
        m1.set(0, 1, CoeffFn::from(s.clone()));
        let theta1 =
            HiggsChart::from_linear_matrices(dims, &[m1.clone()], Polarity::Holomorphic).unwrap();

        let mut delta_mat = CoeffMat::zeros(dims, 2, 2);
        delta_mat.set(1, 0, CoeffFn::constant(dims, c(0.0, 3.0)));
        let m2 = m1.add(&delta_mat);
        let theta2 =
            HiggsChart::from_linear_matrices(dims, &[m2], Polarity::Holomorphic).unwrap();
        let delta = theta2.theta().sub(theta1.theta());

        let f1 = higgs_to_flat(&theta1, &dbar_g, &metric, &beta, &rf).unwrap();
        let f2 = higgs_to_flat(&theta2, &dbar_g, &metric, &beta, &rf).unwrap();

        let shift = f2
            .nabla
            .symbolic_c()
            .unwrap()
            .sub(&f1.nabla.symbolic_c().unwrap());
        let expect = delta.mul(&q.inverse().unwrap()).neg();
        assert!(shift.semantic_eq(&expect));
    }

    #[test]
    fn frame_maps_that_move_the_form_are_rejected() {
        let dims = Dims::new(1, 2);
        let h = CoeffMat::identity(dims, 2);
        let metric = metric_from_linear_hermitian(dims, &h).unwrap();
        let points = PointSampler::new(dims, 3).points(6, 0.5);

        // rotation preserves the identity form
        let rot = CoeffMat::from_constants(
            dims,
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)],
        );
        let beta = BetaMap::vertical_linear(dims, rot).unwrap();
        beta.check_preserves_form(&metric, &points, 1e-12).unwrap();

        // a stretch does not
        let stretch = CoeffMat::from_constants(
            dims,
            2,
            2,
            &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        );
        let beta2 = BetaMap::vertical_linear(dims, stretch).unwrap();
        assert!(matches!(
            beta2.check_preserves_form(&metric, &points, 1e-12),
            Err(ChartError::BetaCheckFailed { .. })
        ));
        let res = beta2.form_preservation_residual(&metric, &points).unwrap();
        assert!((res - 3.0).abs() < 1e-12);
    }
}
