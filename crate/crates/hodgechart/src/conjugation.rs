//! Conjugation of Higgs fields by a hermitian pairing.
//!
//! For a fiberwise linear field with per-direction matrices `M^i`, the
//! conjugate field has matrices
//!
//! ```text
//! Mb^i = -P (M^i)^H P^{-1}
//! ```
//!
//! where `P` is the fiber block of the metric and the adjoint includes
//! complex conjugation of the coefficient functions. Applying the map
//! twice returns the original field whenever `P` is hermitian, which
//! is enforced at the call site. Fields that are not fiberwise linear
//! carry no canonical conjugate; callers must supply their own real
//! form and that map is checked to be an involution on the data it is
//! given.

use std::sync::Arc;

use crate::bundles::{HiggsChart, Polarity};
use crate::chern::MetricChart;
use crate::error::ChartError;
use crate::symcore::{CoeffMat, Dims, PointSampler};

/// How to conjugate a Higgs field.
#[derive(Clone)]
pub enum RealFormSpec {
    /// The pairing-adjoint form for fiberwise linear fields, with the
    /// fiber metric block as pairing.
    LinearUnitary,
    /// A caller-supplied map on the coefficient matrix. Checked to be
    /// an involution on the field it is applied to.
    Custom(Arc<dyn Fn(&CoeffMat) -> CoeffMat + Send + Sync>),
}

impl std::fmt::Debug for RealFormSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RealFormSpec::LinearUnitary => f.write_str("LinearUnitary"),
            RealFormSpec::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Conjugates per-direction matrices of a linear field by a hermitian
/// invertible pairing free of fiber coordinates.
pub fn conjugate_linear_matrices(
    mats: &[CoeffMat],
    pairing: &CoeffMat,
) -> Result<Vec<CoeffMat>, ChartError> {
    if !pairing.is_fiber_free() {
        return Err(ChartError::UnsupportedMetric {
            context: "conjugation pairing must not depend on fiber coordinates",
        });
    }
    if !pairing.is_hermitian() {
        return Err(ChartError::NotHermitian {
            context: "conjugation pairing",
        });
    }
    let p_inv = pairing.inverse().map_err(|_| ChartError::SingularMatrix {
        what: "conjugation pairing",
    })?;
    mats.iter()
        .map(|m| {
            m.check_shape(pairing.nrows(), pairing.nrows(), "linear Higgs matrix")?;
            Ok(pairing.mul(&m.adjoint()).mul(&p_inv).neg())
        })
        .collect()
}

fn flip(polarity: Polarity) -> Polarity {
    match polarity {
        Polarity::Holomorphic => Polarity::AntiHolomorphic,
        Polarity::AntiHolomorphic => Polarity::Holomorphic,
    }
}

/// Conjugate a Higgs field. The linear route extracts per-direction
/// matrices and conjugates them by the fiber metric block; fields that
/// fail the linearity extraction are rejected so the caller knows to
/// provide a custom real form.
pub fn conjugate_higgs(
    h: &HiggsChart,
    metric: &MetricChart,
    spec: &RealFormSpec,
) -> Result<HiggsChart, ChartError> {
    let dims = h.dims();
    metric.dims().check_eq(dims, "conjugation inputs")?;
    match spec {
        RealFormSpec::LinearUnitary => {
            let mats = h
                .to_linear_matrices()
                .map_err(|_| ChartError::ConjugationUndefined)?;
            let conj = conjugate_linear_matrices(&mats, metric.a())?;
            HiggsChart::from_linear_matrices(dims, &conj, flip(h.polarity()))
        }
        RealFormSpec::Custom(f) => {
            let theta = f(h.theta());
            theta.check_shape(dims.m, dims.r, "custom real form output")?;
            check_involution(f, h.theta(), dims)?;
            Ok(HiggsChart::conjugate_parts_with_polarity(
                dims,
                theta,
                flip(h.polarity()),
            ))
        }
    }
}

/// A custom real form must return the original field when applied
/// twice. Exact equality is tried first; a numeric sweep catches maps
/// that only change the representation.
fn check_involution(
    f: &Arc<dyn Fn(&CoeffMat) -> CoeffMat + Send + Sync>,
    theta: &CoeffMat,
    dims: Dims,
) -> Result<(), ChartError> {
    let twice = f(&f(theta));
    if twice.semantic_eq(theta) {
        return Ok(());
    }
    let mut residual: f64 = 0.0;
    let mut sampler = PointSampler::new(dims, 0x5EED_0003);
    for _ in 0..16 {
        let p = sampler.point(0.7);
        let a = twice.eval(&p)?;
        let b = theta.eval(&p)?;
        residual = residual.max((a - b).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    if residual > 1e-8 {
        return Err(ChartError::NotAnInvolution { residual });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{CoeffFn, Var, WirtingerPoly};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_pairing_negates_the_adjoint() {
        let dims = Dims::new(1, 2);
        let nilpotent = CoeffMat::from_constants(
            dims,
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        );
        let pairing = CoeffMat::identity(dims, 2);
        let conj = conjugate_linear_matrices(&[nilpotent], &pairing).unwrap();
        let expect = CoeffMat::from_constants(
            dims,
            2,
            2,
            &[c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)],
        );
        assert!(conj[0].semantic_eq(&expect));
    }

    #[test]
    fn conjugating_twice_returns_the_original_matrices() {
        let dims = Dims::new(1, 2);
        let s = WirtingerPoly::variable(dims, Var::S(0));
        let mut theta_mat = CoeffMat::zeros(dims, 2, 2);
        theta_mat.set(0, 1, CoeffFn::from(s.clone()));
        theta_mat.set(1, 0, CoeffFn::constant(dims, c(1.0, -2.0)));
        theta_mat.set(1, 1, CoeffFn::from(s.mul(&s)));

        let pairing = CoeffMat::from_constants(
            dims,
            2,
            2,
            &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)],
        );
        let once = conjugate_linear_matrices(&[theta_mat.clone()], &pairing).unwrap();
        let twice = conjugate_linear_matrices(&once, &pairing).unwrap();
        assert!(twice[0].semantic_eq(&theta_mat));
    }

    #[test]
    fn higgs_conjugation_flips_polarity_and_round_trips() {
        let dims = Dims::new(1, 2);
        let s = WirtingerPoly::variable(dims, Var::S(0));
        let mut mat = CoeffMat::zeros(dims, 2, 2);
        mat.set(0, 1, CoeffFn::from(s));
        let h = HiggsChart::from_linear_matrices(dims, &[mat], Polarity::Holomorphic).unwrap();

        let metric = crate::chern::MetricChart::new(
            dims,
            CoeffMat::identity(dims, 2),
            CoeffMat::zeros(dims, 1, 2),
            None,
        )
        .unwrap();

        let conj = conjugate_higgs(&h, &metric, &RealFormSpec::LinearUnitary).unwrap();
        assert_eq!(conj.polarity(), Polarity::AntiHolomorphic);
        assert!(!conj.theta().is_holomorphic());

        let back = conjugate_higgs(&conj, &metric, &RealFormSpec::LinearUnitary).unwrap();
        assert_eq!(back.polarity(), Polarity::Holomorphic);
        assert!(back.theta().semantic_eq(h.theta()));
    }

    #[test]
    fn nonlinear_fields_need_a_custom_real_form() {
        let dims = Dims::new(1, 1);
        let t = WirtingerPoly::variable(dims, Var::T(0));
        let mut theta = CoeffMat::zeros(dims, 1, 1);
        theta.set(0, 0, CoeffFn::from(t.mul(&t)));
        let h = HiggsChart::new_holomorphic(dims, theta).unwrap();
        let metric = crate::chern::MetricChart::new(
            dims,
            CoeffMat::identity(dims, 1),
            CoeffMat::zeros(dims, 1, 1),
            None,
        )
        .unwrap();

        let err = conjugate_higgs(&h, &metric, &RealFormSpec::LinearUnitary).unwrap_err();
        assert!(matches!(err, ChartError::ConjugationUndefined));
        assert_eq!(
            err.to_string(),
            "conjugation undefined: supply custom real form"
        );

        // negated entrywise conjugate is an involution on anything
        let custom = RealFormSpec::Custom(Arc::new(|m: &CoeffMat| m.conj().neg()));
        let conj = conjugate_higgs(&h, &metric, &custom).unwrap();
        assert_eq!(conj.polarity(), Polarity::AntiHolomorphic);
        let back = conjugate_higgs(&conj, &metric, &custom).unwrap();
        assert!(back.theta().semantic_eq(h.theta()));
    }

    #[test]
    fn custom_form_must_be_an_involution() {
        let dims = Dims::new(1, 1);
        let t = WirtingerPoly::variable(dims, Var::T(0));
        let mut theta = CoeffMat::zeros(dims, 1, 1);
        theta.set(0, 0, CoeffFn::from(t));
        let h = HiggsChart::new_holomorphic(dims, theta).unwrap();
        let metric = crate::chern::MetricChart::new(
            dims,
            CoeffMat::identity(dims, 1),
            CoeffMat::zeros(dims, 1, 1),
            None,
        )
        .unwrap();

        let doubler = RealFormSpec::Custom(Arc::new(|m: &CoeffMat| {
            m.conj().scale_complex(c(2.0, 0.0))
        }));
        assert!(matches!(
            conjugate_higgs(&h, &metric, &doubler),
            Err(ChartError::NotAnInvolution { .. })
        ));
    }
}
