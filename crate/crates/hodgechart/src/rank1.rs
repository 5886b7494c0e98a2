//! Rank-two weight-one variations of Hodge structure from a period
//! map, their Kodaira-Spencer Higgs systems, and harmonicity of the
//! Hodge metric.
//!
//! A holomorphic `tau(s)` with positive imaginary part determines a
//! family of elliptic curves with flat frame `(e1, e2)` and Hodge
//! filtration spanned by `omega = tau e1 + e2`. Differentiating the
//! filtration frame by the flat connection and projecting modulo the
//! filtration gives the graded Higgs coefficient `tau'(s)`; the
//! weight-one polarization induces the Hodge metric
//! `diag(q, 1/q)` with `q = -i(tau - taubar) = 2 Im tau` on the graded
//! frame. The resulting linear system is harmonic for every
//! holomorphic period map, which the flat-side tensors confirm
//! exactly.

use num_complex::Complex64;

use crate::bundles::{pullback_higgs, FiberMap, HiggsChart, Polarity};
use crate::chern::{metric_from_linear_hermitian, MetricChart};
use crate::conjugation::RealFormSpec;
use crate::curvature::{assemble_f, AxisGrid, CurvatureReport, Grid, RingGrid};
use crate::error::ChartError;
use crate::simpson::BetaMap;
use crate::symcore::{ChartPoint, CoeffFn, CoeffMat, Dims, Var, WirtingerPoly};

/// A period map on a base disc. The polynomial depends on `s` alone
/// and must keep `Im tau` above `min_imag` on the sampled domain.
#[derive(Debug, Clone)]
pub struct PeriodScenario {
    tau: WirtingerPoly,
    pub domain: AxisGrid,
    pub min_imag: f64,
}

const RANK1_DIMS: Dims = Dims { m: 1, r: 2 };

impl PeriodScenario {
    pub fn new(tau: WirtingerPoly, domain: AxisGrid) -> Result<PeriodScenario, ChartError> {
        tau.dims().check_eq(RANK1_DIMS, "period map chart")?;
        let probe = CoeffMat::from_polys(RANK1_DIMS, 1, 1, vec![tau.clone()]);
        if !tau.is_holomorphic() || !probe.is_fiber_free() {
            return Err(ChartError::invalid(
                "period map must be a holomorphic function of the base variable",
            ));
        }
        Ok(PeriodScenario {
            tau,
            domain,
            min_imag: 1e-6,
        })
    }

    pub fn tau(&self) -> &WirtingerPoly {
        &self.tau
    }

    /// Base lattice from the declared domain, one fiber ring per
    /// graded factor.
    pub fn default_grid(&self) -> Grid {
        Grid {
            base: vec![self.domain.clone()],
            fiber: (0..RANK1_DIMS.r)
                .map(|_| RingGrid {
                    center: Complex64::new(0.0, 0.0),
                    radius: 1.0,
                    n: 3,
                })
                .collect(),
        }
    }

    /// `2 Im tau` at each point, guarding the positivity invariant.
    pub fn check_periods(&self, points: &[ChartPoint]) -> Result<(), ChartError> {
        let q = CoeffFn::from(period_q(&self.tau));
        for p in points {
            let v = q.eval(p)?;
            if v.re <= 2.0 * self.min_imag {
                return Err(ChartError::PeriodNotPositive {
                    s: p.s[0],
                    value: v.re / 2.0,
                });
            }
        }
        Ok(())
    }
}

fn period_q(tau: &WirtingerPoly) -> WirtingerPoly {
    tau.sub(&tau.conj()).scale(Complex64::new(0.0, -1.0))
}

/// The graded Higgs system of a period scenario: field, Hodge metric
/// matrix, and the induced chart metric.
#[derive(Debug, Clone)]
pub struct KsSystem {
    pub theta: HiggsChart,
    pub hodge: CoeffMat,
    pub metric: MetricChart,
}

/// Kodaira-Spencer system of the scenario: Higgs coefficient `tau'` in
/// the graded frame, Hodge metric `diag(2 Im tau, 1 / (2 Im tau))`.
pub fn ks_system(p: &PeriodScenario) -> Result<KsSystem, ChartError> {
    let dims = RANK1_DIMS;
    let q = period_q(&p.tau);
    let h11 = CoeffFn::from(q.clone());
    let h22 = h11.recip()?;
    let mut hodge = CoeffMat::zeros(dims, 2, 2);
    hodge.set(0, 0, h11);
    hodge.set(1, 1, h22);
    let metric = metric_from_linear_hermitian(dims, &hodge)?;

    let tau_prime = p.tau.wirtinger_derive(Var::S(0));
    let mut big_theta = CoeffMat::zeros(dims, 2, 2);
    big_theta.set(0, 1, CoeffFn::from(tau_prime));
    let theta = HiggsChart::from_linear_matrices(dims, &[big_theta], Polarity::Holomorphic)?;

    Ok(KsSystem {
        theta,
        hodge,
        metric,
    })
}

/// The field vanishes exactly when the period map is constant.
pub fn is_isotrivial(p: &PeriodScenario) -> bool {
    p.tau.wirtinger_derive(Var::S(0)).is_zero()
}

/// The two period sections spanning the lattice in the graded frame:
/// the images of the flat integral frame modulo the filtration.
pub fn lattice_sections(p: &PeriodScenario) -> [WirtingerPoly; 2] {
    [
        WirtingerPoly::one(RANK1_DIMS),
        p.tau.clone().scale(Complex64::new(-1.0, 0.0)),
    ]
}

/// Translation of the graded-quotient fiber coordinate by a section.
pub fn translate_by_section(
    theta: &HiggsChart,
    lambda: &WirtingerPoly,
) -> Result<HiggsChart, ChartError> {
    let dims = RANK1_DIMS;
    let t1 = WirtingerPoly::variable(dims, Var::T(0));
    let t2 = WirtingerPoly::variable(dims, Var::T(1));
    let map = FiberMap::new(dims, vec![t1, t2.add(lambda)])?;
    pullback_higgs(theta, &map)
}

/// Harmonicity verdict of the Hodge metric on the Kodaira-Spencer
/// system: the flat-side tensors of the transformed pair with the
/// identity comparison map.
pub fn rank1_harmonicity(
    p: &PeriodScenario,
    grid: &Grid,
    tol: f64,
) -> Result<CurvatureReport, ChartError> {
    let points = grid.points(RANK1_DIMS)?;
    p.check_periods(&points)?;
    let sys = ks_system(p)?;
    let beta = BetaMap::identity(RANK1_DIMS);
    let (report, _) = assemble_f(
        &sys.theta,
        &sys.metric,
        &beta,
        &RealFormSpec::LinearUnitary,
        &points,
        tol,
    )?;
    Ok(report)
}
