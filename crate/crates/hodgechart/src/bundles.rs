//! Charts for del-bar operators, almost connections, and Higgs fields.
//!
//! Over a product chart with base coordinates `s` and fiber
//! coordinates `t`, the three first-order objects are stored through
//! their coefficient matrices:
//!
//! * a del-bar operator lifts `d/dsb_i` to `d/dsb_i + sum_k u_ik d/dt_k`,
//! * an almost connection lifts `d/ds_i` to `d/ds_i + sum_k c_ik d/dt_k`
//!   modulo conjugate fiber directions,
//! * a Higgs field sends `d/ds_i` to the vertical field
//!   `sum_k theta_ik d/dt_k`.
//!
//! Metric-induced connections keep their defining data instead of a
//! closed form, because the fiber block inverse is rational; values and
//! first derivatives are produced pointwise on demand.

use num_complex::Complex64;

use crate::chern::MetricChart;
use crate::error::ChartError;
use crate::symcore::{
    lie_bracket, CoeffFn, CoeffMat, ChartPoint, Dims, MatJet, PointSampler, Var, VectorFieldChart,
    WirtingerPoly,
};

/// A product chart of the bundle: base and fiber dimensions plus a
/// human-readable label for reports.
#[derive(Debug, Clone)]
pub struct FiberChart {
    pub dims: Dims,
    pub label: String,
}

impl FiberChart {
    pub fn new(dims: Dims, label: impl Into<String>) -> Self {
        FiberChart {
            dims,
            label: label.into(),
        }
    }
}

/// Coefficients of a del-bar operator: `u` is `m x r`, row `i` holding
/// the vertical part of the lift of `d/dsb_i`.
#[derive(Debug, Clone)]
pub struct DBarChart {
    dims: Dims,
    u: CoeffMat,
}

impl DBarChart {
    pub fn new(dims: Dims, u: CoeffMat) -> Result<Self, ChartError> {
        u.check_shape(dims.m, dims.r, "del-bar coefficient matrix")?;
        dims.check_eq(u.dims(), "del-bar coefficient chart")?;
        Ok(DBarChart { dims, u })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn u(&self) -> &CoeffMat {
        &self.u
    }

    /// The coefficients satisfy the local lifting condition when no
    /// conjugate fiber variable occurs, i.e. the operator restricts to
    /// honest vertical antiholomorphy.
    pub fn satisfies_lifting_condition(&self) -> bool {
        self.u.is_tbar_free()
    }

    /// The lifted field `d/dsb_i + sum_k u_ik d/dt_k`.
    pub fn lift(&self, i: usize) -> VectorFieldChart {
        let mut f = VectorFieldChart::coordinate(self.dims, Var::SBar(i));
        for k in 0..self.dims.r {
            f.set_coeff(Var::T(k), self.u.get(i, k).clone());
        }
        f
    }

    /// Apply the lift of `d/dsb_i` to a coefficient function.
    pub fn lift_apply(&self, i: usize, f: &CoeffFn) -> CoeffFn {
        let mut acc = f.wirtinger_derive(Var::SBar(i));
        for k in 0..self.dims.r {
            let u = self.u.get(i, k);
            if u.is_zero() {
                continue;
            }
            let df = f.wirtinger_derive(Var::T(k));
            if df.is_zero() {
                continue;
            }
            acc = acc.add(&u.mul(&df));
        }
        acc
    }
}

/// The unperturbed operator: every lift is the coordinate field itself.
pub fn canonical_dbar(chart: &FiberChart) -> DBarChart {
    DBarChart {
        dims: chart.dims,
        u: CoeffMat::zeros(chart.dims, chart.dims.m, chart.dims.r),
    }
}

/// The antiholomorphic distribution of the almost complex structure
/// induced by a del-bar operator: spanned by the conjugate fiber frame
/// and the lifted conjugate base frame.
#[derive(Debug, Clone)]
pub struct AlmostComplexStructure {
    dims: Dims,
    generators: Vec<VectorFieldChart>,
}

impl AlmostComplexStructure {
    pub fn generators(&self) -> &[VectorFieldChart] {
        &self.generators
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }
}

/// Builds the distribution and certifies that it is a genuine almost
/// complex structure: at each sample point the generators and their
/// conjugates must span the full tangent space, so the distribution
/// meets its conjugate only in zero.
pub fn dbar_to_acs(
    d: &DBarChart,
    sample_points: &[ChartPoint],
) -> Result<AlmostComplexStructure, ChartError> {
    let dims = d.dims();
    let n = dims.m + dims.r;
    let mut generators = Vec::with_capacity(n);
    for i in 0..dims.m {
        generators.push(d.lift(i));
    }
    for k in 0..dims.r {
        generators.push(VectorFieldChart::coordinate(dims, Var::TBar(k)));
    }

    for p in sample_points {
        let mut stacked = crate::symcore::CMat::zeros(2 * n, 2 * n);
        for (row, g) in generators.iter().enumerate() {
            let vals = g.eval(p)?;
            for (col, v) in vals.iter().enumerate() {
                stacked[(row, col)] = *v;
                // conj generator: coefficients conjugated, frame bars swapped
                let swapped = Var::from_flat(col, dims).conj().flat(dims);
                stacked[(n + row, swapped)] = v.conj();
            }
        }
        if crate::symcore::numeric_rank(&stacked, 1e-8) < 2 * n {
            return Err(ChartError::invalid(format!(
                "distribution meets its conjugate at s={:?}, t={:?}",
                p.s, p.t
            )));
        }
    }

    Ok(AlmostComplexStructure { dims, generators })
}

/// Default sample points for numeric spot checks.
pub fn default_sample_points(dims: Dims, n: usize) -> Vec<ChartPoint> {
    PointSampler::new(dims, 0x5EED_0001).points(n, 0.75)
}

/// A concrete witness that some predicate fails: the offending bracket
/// pair, the frame direction, and a point where the residual is
/// visibly nonzero.
#[derive(Debug, Clone)]
pub struct BracketWitness {
    pub pair: (usize, usize),
    pub component: Var,
    pub point: ChartPoint,
    pub value: Complex64,
}

#[derive(Debug, Clone)]
pub struct IntegrabilityVerdict {
    pub integrable: bool,
    pub witness: Option<BracketWitness>,
}

/// Frobenius integrability of the antiholomorphic distribution: every
/// pairwise bracket of the generators must lie back in their span with
/// function coefficients.
///
/// The span membership is decided exactly: each generator is the only
/// one with a nonzero coefficient on its own conjugate frame direction,
/// so the candidate combination is forced and the residual is a
/// symbolic vector field tested for zero.
pub fn is_integrable_acs(acs: &AlmostComplexStructure) -> IntegrabilityVerdict {
    let dims = acs.dims;
    let gens = &acs.generators;
    for a in 0..gens.len() {
        for b in (a + 1)..gens.len() {
            let w = lie_bracket(&gens[a], &gens[b]);
            let residual = span_residual(dims, gens, &w);
            if !residual.is_zero() {
                let witness = locate_witness(dims, &residual, (a, b));
                return IntegrabilityVerdict {
                    integrable: false,
                    witness,
                };
            }
        }
    }
    IntegrabilityVerdict {
        integrable: true,
        witness: None,
    }
}

/// Subtract the forced combination of generators from `w`. Generators
/// are indexed as in [`dbar_to_acs`]: lifted conjugate base frames
/// first, conjugate fiber frames last.
fn span_residual(
    dims: Dims,
    gens: &[VectorFieldChart],
    w: &VectorFieldChart,
) -> VectorFieldChart {
    let mut residual = w.clone();
    for i in 0..dims.m {
        let lambda = residual.coeff(Var::SBar(i)).clone();
        if !lambda.is_zero() {
            residual = residual.add(&gens[i].scale(&lambda).neg());
        }
    }
    for k in 0..dims.r {
        let mu = residual.coeff(Var::TBar(k)).clone();
        if !mu.is_zero() {
            residual = residual.add(&gens[dims.m + k].scale(&mu).neg());
        }
    }
    residual
}

/// Find a point where a symbolically nonzero field is numerically
/// visible. Polynomial components vanish only on thin sets, so a short
/// deterministic scan suffices.
fn locate_witness(
    dims: Dims,
    residual: &VectorFieldChart,
    pair: (usize, usize),
) -> Option<BracketWitness> {
    let mut sampler = PointSampler::new(dims, 0x5EED_0002);
    for _ in 0..64 {
        let p = sampler.point(1.0);
        for var in Var::all(dims) {
            if let Ok(v) = residual.coeff(var).eval(&p) {
                if v.norm() > 1e-9 {
                    return Some(BracketWitness {
                        pair,
                        component: var,
                        point: p,
                        value: v,
                    });
                }
            }
        }
    }
    None
}

/// How an almost connection is stored.
#[derive(Debug, Clone)]
pub enum ConnRepr {
    /// Closed-form coefficients. `cbar` optionally records conjugate
    /// vertical components of the distinguished lift; they vanish
    /// modulo the conjugate fiber directions and only matter when the
    /// connection came from a metric over a perturbed del-bar operator.
    Explicit {
        c: CoeffMat,
        cbar: Option<CoeffMat>,
    },
    /// The metric connection of a del-bar chart: vertical part
    /// `-B A^{-1}` evaluated pointwise, conjugate vertical part the
    /// conjugate of the del-bar coefficients.
    Chern {
        metric: Box<MetricChart>,
        dbar: DBarChart,
    },
    /// A metric connection shifted by explicit vertical coefficients,
    /// as produced by the transform from Higgs to flat data. Keeping
    /// the shift separate lets the reverse transform cancel the metric
    /// part exactly.
    ChernPlus {
        metric: Box<MetricChart>,
        dbar: DBarChart,
        extra: CoeffMat,
    },
}

/// An almost connection chart. Rows index base directions, columns
/// fiber directions.
#[derive(Debug, Clone)]
pub struct ConnectionChart {
    dims: Dims,
    repr: ConnRepr,
}

impl ConnectionChart {
    pub fn explicit(dims: Dims, c: CoeffMat) -> Result<Self, ChartError> {
        c.check_shape(dims.m, dims.r, "connection coefficient matrix")?;
        dims.check_eq(c.dims(), "connection coefficient chart")?;
        Ok(ConnectionChart {
            dims,
            repr: ConnRepr::Explicit { c, cbar: None },
        })
    }

    pub fn explicit_with_conjugate_part(
        dims: Dims,
        c: CoeffMat,
        cbar: CoeffMat,
    ) -> Result<Self, ChartError> {
        c.check_shape(dims.m, dims.r, "connection coefficient matrix")?;
        cbar.check_shape(dims.m, dims.r, "conjugate vertical components")?;
        Ok(ConnectionChart {
            dims,
            repr: ConnRepr::Explicit { c, cbar: Some(cbar) },
        })
    }

    pub(crate) fn from_repr(dims: Dims, repr: ConnRepr) -> Self {
        ConnectionChart { dims, repr }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn repr(&self) -> &ConnRepr {
        &self.repr
    }

    /// Closed-form vertical coefficients, when the representation
    /// admits them. Metric connections materialize only if the fiber
    /// block of the metric is free of fiber coordinates, which keeps
    /// the inverse inside the coefficient function class.
    pub fn symbolic_c(&self) -> Result<CoeffMat, ChartError> {
        match &self.repr {
            ConnRepr::Explicit { c, .. } => Ok(c.clone()),
            ConnRepr::Chern { metric, .. } => metric.chern_symbolic(),
            ConnRepr::ChernPlus { metric, extra, .. } => {
                Ok(metric.chern_symbolic()?.add(extra))
            }
        }
    }

    /// Conjugate vertical components of the distinguished lift, when
    /// present.
    pub fn symbolic_cbar(&self) -> Option<CoeffMat> {
        match &self.repr {
            ConnRepr::Explicit { cbar, .. } => cbar.clone(),
            ConnRepr::Chern { dbar, .. } | ConnRepr::ChernPlus { dbar, .. } => {
                Some(dbar.u().conj())
            }
        }
    }

    /// Value and first derivatives of the vertical coefficients at a
    /// point, together with the conjugate vertical block if any.
    pub fn jet(&self, p: &ChartPoint) -> Result<(MatJet, Option<MatJet>), ChartError> {
        match &self.repr {
            ConnRepr::Explicit { c, cbar } => {
                let cj = c.eval_jet(p)?;
                let bj = cbar.as_ref().map(|b| b.eval_jet(p)).transpose()?;
                Ok((cj, bj))
            }
            ConnRepr::Chern { metric, dbar } => {
                let cj = metric.chern_jet(p)?;
                let bj = dbar.u().conj().eval_jet(p)?;
                Ok((cj, Some(bj)))
            }
            ConnRepr::ChernPlus {
                metric,
                dbar,
                extra,
            } => {
                let base = metric.chern_jet(p)?;
                let shift = extra.eval_jet(p)?;
                let value = base.value + shift.value;
                let d = base
                    .d
                    .into_iter()
                    .zip(shift.d)
                    .map(|(a, b)| a + b)
                    .collect();
                let bj = dbar.u().conj().eval_jet(p)?;
                Ok((MatJet { value, d }, Some(bj)))
            }
        }
    }

    /// The distinguished lift of `d/ds_i` as a symbolic field,
    /// available for closed-form representations.
    pub fn lift(&self, i: usize) -> Result<VectorFieldChart, ChartError> {
        let c = self.symbolic_c()?;
        let mut f = VectorFieldChart::coordinate(self.dims, Var::S(i));
        for k in 0..self.dims.r {
            f.set_coeff(Var::T(k), c.get(i, k).clone());
        }
        if let Some(cbar) = self.symbolic_cbar() {
            for k in 0..self.dims.r {
                f.set_coeff(Var::TBar(k), cbar.get(i, k).clone());
            }
        }
        Ok(f)
    }

    /// Vertical holomorphy: no coefficient depends on a conjugate
    /// fiber variable. Decided structurally on the closed form when one
    /// exists, on the metric blocks otherwise, and confirmed
    /// numerically through derivative jets at sample points.
    pub fn is_holomorphic_vertical(&self, sample_points: &[ChartPoint]) -> Result<bool, ChartError> {
        let structural = match &self.repr {
            ConnRepr::Explicit { c, .. } => c.is_tbar_free(),
            ConnRepr::Chern { metric, dbar } | ConnRepr::ChernPlus { metric, dbar, .. } => {
                let shift_ok = match &self.repr {
                    ConnRepr::ChernPlus { extra, .. } => extra.is_tbar_free(),
                    _ => true,
                };
                shift_ok && metric.chern_is_tbar_free()? && dbar.u().is_tbar_free()
            }
        };
        if !structural {
            return Ok(false);
        }
        for p in sample_points {
            let (cj, _) = self.jet(p)?;
            for k in 0..self.dims.r {
                let d = &cj.d[Var::TBar(k).flat(self.dims)];
                if d.iter().any(|z| z.norm() > 1e-10) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Frame transformation law of connection coefficients at a fixed
/// point: `C' = S^{-1} C T` for a base frame change `S` and a vertical
/// frame change `T`. Substitution of coordinates in the coefficient
/// functions is the caller's business; this is the tensorial part.
pub fn apply_coordinate_change(
    conn: &ConnectionChart,
    s_change: &CoeffMat,
    t_change: &CoeffMat,
) -> Result<ConnectionChart, ChartError> {
    let dims = conn.dims();
    s_change.check_shape(dims.m, dims.m, "base frame change")?;
    t_change.check_shape(dims.r, dims.r, "vertical frame change")?;
    if !s_change.is_holomorphic() || !t_change.is_holomorphic() {
        return Err(ChartError::NotHolomorphic {
            context: "frame change matrices",
        });
    }
    let s_inv = s_change.inverse().map_err(|_| ChartError::SingularMatrix {
        what: "base frame change",
    })?;
    let c = conn.symbolic_c()?;
    let c_new = s_inv.mul(&c).mul(t_change);
    match conn.symbolic_cbar() {
        Some(cbar) => {
            let cbar_new = s_inv.mul(&cbar).mul(&t_change.conj());
            ConnectionChart::explicit_with_conjugate_part(dims, c_new, cbar_new)
        }
        None => ConnectionChart::explicit(dims, c_new),
    }
}

/// Which base frame a Higgs-type chart pairs with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    /// Values against the holomorphic base frame `d/ds_i`.
    Holomorphic,
    /// Values against the conjugate base frame `d/dsb_i`, as produced
    /// by conjugation.
    AntiHolomorphic,
}

/// A Higgs field chart: row `i` holds the vertical coefficients of the
/// image of the `i`-th base direction.
#[derive(Debug, Clone)]
pub struct HiggsChart {
    dims: Dims,
    theta: CoeffMat,
    polarity: Polarity,
    holomorphic: bool,
}

impl HiggsChart {
    /// A Higgs field with holomorphic coefficients. Fails when any
    /// barred variable occurs.
    pub fn new_holomorphic(dims: Dims, theta: CoeffMat) -> Result<Self, ChartError> {
        theta.check_shape(dims.m, dims.r, "Higgs coefficient matrix")?;
        if !theta.is_holomorphic() {
            return Err(ChartError::NotHolomorphic {
                context: "Higgs coefficients",
            });
        }
        Ok(HiggsChart {
            dims,
            theta,
            polarity: Polarity::Holomorphic,
            holomorphic: true,
        })
    }

    /// An almost Higgs field: arbitrary smooth coefficients, no
    /// holomorphy claim. Integrability is undefined for these.
    pub fn new_almost(dims: Dims, theta: CoeffMat) -> Result<Self, ChartError> {
        theta.check_shape(dims.m, dims.r, "Higgs coefficient matrix")?;
        Ok(HiggsChart {
            dims,
            theta,
            polarity: Polarity::Holomorphic,
            holomorphic: false,
        })
    }

    pub(crate) fn conjugate_parts_with_polarity(
        dims: Dims,
        theta: CoeffMat,
        polarity: Polarity,
    ) -> Self {
        let holomorphic = polarity == Polarity::Holomorphic && theta.is_holomorphic();
        HiggsChart {
            dims,
            theta,
            polarity,
            holomorphic,
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn theta(&self) -> &CoeffMat {
        &self.theta
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn is_holomorphic(&self) -> bool {
        self.holomorphic
    }

    /// The vertical field attached to base direction `i`.
    pub fn vertical_field(&self, i: usize) -> VectorFieldChart {
        let mut f = VectorFieldChart::zero(self.dims);
        for k in 0..self.dims.r {
            f.set_coeff(Var::T(k), self.theta.get(i, k).clone());
        }
        f
    }

    /// Extract per-direction matrices of a fiberwise linear field:
    /// `theta_ik = sum_j t_j M^i_jk` with `M^i` free of fiber
    /// variables. Exact: the reconstruction is compared symbolically.
    pub fn to_linear_matrices(&self) -> Result<Vec<CoeffMat>, ChartError> {
        let dims = self.dims;
        let row = CoeffMat::fiber_row(dims);
        let mut out = Vec::with_capacity(dims.m);
        for i in 0..dims.m {
            let mut mat = CoeffMat::zeros(dims, dims.r, dims.r);
            for k in 0..dims.r {
                for j in 0..dims.r {
                    let d = self.theta.get(i, k).wirtinger_derive(Var::T(j));
                    mat.set(j, k, d);
                }
            }
            if !mat.is_fiber_free() {
                return Err(ChartError::invalid(
                    "Higgs field is not fiberwise linear in the fiber variables",
                ));
            }
            if !row.mul(&mat).semantic_eq(&self.theta.row(i)) {
                return Err(ChartError::invalid(
                    "Higgs field is not fiberwise linear in the fiber variables",
                ));
            }
            out.push(mat);
        }
        Ok(out)
    }

    /// Build the rows `t . M^i` of a linear field from per-direction
    /// matrices.
    pub fn from_linear_matrices(
        dims: Dims,
        mats: &[CoeffMat],
        polarity: Polarity,
    ) -> Result<Self, ChartError> {
        if mats.len() != dims.m {
            return Err(ChartError::invalid(format!(
                "expected {} per-direction matrices, got {}",
                dims.m,
                mats.len()
            )));
        }
        let row = CoeffMat::fiber_row(dims);
        let mut rows = Vec::with_capacity(dims.m);
        for mat in mats {
            mat.check_shape(dims.r, dims.r, "linear Higgs matrix")?;
            rows.push(row.mul(mat));
        }
        let theta = CoeffMat::from_rows(rows);
        let holomorphic = polarity == Polarity::Holomorphic && theta.is_holomorphic();
        Ok(HiggsChart {
            dims,
            theta,
            polarity,
            holomorphic,
        })
    }
}

/// Pairwise commutation of the vertical fields of a holomorphic Higgs
/// field. Almost Higgs fields are rejected: without holomorphy the
/// bracket is not the obstruction the verdict claims to test.
pub fn is_higgs_integrable(h: &HiggsChart) -> Result<IntegrabilityVerdict, ChartError> {
    if !h.is_holomorphic() {
        return Err(ChartError::AlmostHiggs);
    }
    let dims = h.dims();
    for i in 0..dims.m {
        for j in (i + 1)..dims.m {
            let w = lie_bracket(&h.vertical_field(i), &h.vertical_field(j));
            if !w.is_zero() {
                let witness = locate_witness(dims, &w, (i, j));
                return Ok(IntegrabilityVerdict {
                    integrable: false,
                    witness,
                });
            }
        }
    }
    Ok(IntegrabilityVerdict {
        integrable: true,
        witness: None,
    })
}

/// A fiberwise polynomial self-map `t -> phi(s, t)` over the identity
/// on the base, holomorphic in all unbarred coordinates.
#[derive(Debug, Clone)]
pub struct FiberMap {
    dims: Dims,
    comps: Vec<WirtingerPoly>,
}

impl FiberMap {
    pub fn new(dims: Dims, comps: Vec<WirtingerPoly>) -> Result<Self, ChartError> {
        if comps.len() != dims.r {
            return Err(ChartError::invalid(format!(
                "fiber map needs {} components, got {}",
                dims.r,
                comps.len()
            )));
        }
        for c in &comps {
            if c.dims() != dims {
                return Err(ChartError::invalid("fiber map component chart dims"));
            }
            if !c.is_holomorphic() {
                return Err(ChartError::NotHolomorphic {
                    context: "fiber map components",
                });
            }
        }
        Ok(FiberMap { dims, comps })
    }

    pub fn comps(&self) -> &[WirtingerPoly] {
        &self.comps
    }

    /// Vertical Jacobian `J_kl = d phi_l / d t_k`.
    pub fn vertical_jacobian(&self) -> CoeffMat {
        let dims = self.dims;
        let mut j = CoeffMat::zeros(dims, dims.r, dims.r);
        for k in 0..dims.r {
            for l in 0..dims.r {
                j.set(
                    k,
                    l,
                    CoeffFn::from(self.comps[l].wirtinger_derive(Var::T(k))),
                );
            }
        }
        j
    }
}

/// Pullback of a Higgs field along a fiberwise map: coefficients are
/// read at the image point and pushed through the vertical Jacobian,
/// `theta'_rows(s, t) = theta_rows(s, phi(s, t)) . J_phi(s, t)`.
pub fn pullback_higgs(h: &HiggsChart, phi: &FiberMap) -> Result<HiggsChart, ChartError> {
    let dims = h.dims();
    if phi.dims != dims {
        return Err(ChartError::DimensionMismatch {
            expected: dims,
            got: phi.dims,
            context: "fiber map for Higgs pullback",
        });
    }
    let substituted = h.theta().map(|f| f.substitute_fiber(&phi.comps));
    let theta = substituted.mul(&phi.vertical_jacobian());
    let holomorphic = h.is_holomorphic() && theta.is_holomorphic();
    Ok(HiggsChart {
        dims,
        theta,
        polarity: h.polarity(),
        holomorphic,
    })
}
