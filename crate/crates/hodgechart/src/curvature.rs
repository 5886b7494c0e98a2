//! The three typed curvature tensors, their grid evaluation, and the
//! harmonicity verdict.
//!
//! For a pair (del-bar operator with coefficients `u`, almost
//! connection with coefficients `c` and conjugate vertical part `ub`)
//! write `lb_i = d/dsb_i + sum u_ik d/dt_k` and
//! `l_i = d/ds_i + sum c_ik d/dt_k + sum ub_ik d/dtb_k`. The three
//! tensors are vertical components of frame brackets:
//!
//! ```text
//! F02_l(i, j) = lb_i(u_jl) - lb_j(u_il)          i < j
//! F11_l(i, j) = l_i(u_jl) - lb_j(c_il)           all (i, j)
//! F20_l(i, j) = l_i(c_jl) - l_j(c_il)            i < j
//! ```
//!
//! The same formulas applied to a Higgs pair give the G-family: G02 is
//! F02 of the Higgs-side del-bar, G11 brackets the vertical Higgs
//! fields against its lifts, and G20 is the vertical self-bracket read
//! back through the comparison frame. Only values and first
//! derivatives of coefficients enter, so everything evaluates from
//! pointwise jets; closed-form variants exist for representations that
//! admit them and give an independent route for cross-checks.
//!
//! Values are reported in the `d/dt`-frame. The identification of the
//! tensors as sections over the base appears here as a per-point
//! supremum over fiber samples.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bundles::{ConnectionChart, DBarChart, HiggsChart};
use crate::chern::MetricChart;
use crate::conjugation::RealFormSpec;
use crate::error::ChartError;
use crate::simpson::{flat_to_higgs, higgs_to_flat, BetaMap, SimpsonFlat, SimpsonHiggs};
use crate::symcore::{lie_bracket, CMat, ChartPoint, CoeffMat, Dims, MatJet, Var};

/// A square lattice of base samples: `n x n` points with real and
/// imaginary parts ranging over `center +- halfwidth`.
#[derive(Debug, Clone)]
pub struct AxisGrid {
    pub center: Complex64,
    pub halfwidth: f64,
    pub n: usize,
}

impl AxisGrid {
    pub fn points(&self) -> Vec<Complex64> {
        if self.n <= 1 {
            return vec![self.center];
        }
        let mut out = Vec::with_capacity(self.n * self.n);
        let step = 2.0 * self.halfwidth / (self.n - 1) as f64;
        for a in 0..self.n {
            for b in 0..self.n {
                out.push(Complex64::new(
                    self.center.re - self.halfwidth + step * a as f64,
                    self.center.im - self.halfwidth + step * b as f64,
                ));
            }
        }
        out
    }
}

/// A ring of fiber samples, offset by half a step so no sample lands
/// on a coordinate axis.
#[derive(Debug, Clone)]
pub struct RingGrid {
    pub center: Complex64,
    pub radius: f64,
    pub n: usize,
}

impl RingGrid {
    pub fn points(&self) -> Vec<Complex64> {
        (0..self.n.max(1))
            .map(|k| {
                let phi =
                    2.0 * std::f64::consts::PI * (k as f64 + 0.5) / self.n.max(1) as f64;
                self.center + self.radius * Complex64::new(phi.cos(), phi.sin())
            })
            .collect()
    }
}

/// Cartesian sampling domain: one axis lattice per base variable, one
/// ring per fiber variable.
#[derive(Debug, Clone)]
pub struct Grid {
    pub base: Vec<AxisGrid>,
    pub fiber: Vec<RingGrid>,
}

impl Grid {
    /// Same lattice on every base variable, same ring on every fiber
    /// variable.
    pub fn standard(
        dims: Dims,
        base_center: Complex64,
        base_halfwidth: f64,
        base_n: usize,
        fiber_radius: f64,
        fiber_n: usize,
    ) -> Grid {
        Grid {
            base: (0..dims.m)
                .map(|_| AxisGrid {
                    center: base_center,
                    halfwidth: base_halfwidth,
                    n: base_n,
                })
                .collect(),
            fiber: (0..dims.r)
                .map(|_| RingGrid {
                    center: Complex64::new(0.0, 0.0),
                    radius: fiber_radius,
                    n: fiber_n,
                })
                .collect(),
        }
    }

    pub fn points(&self, dims: Dims) -> Result<Vec<ChartPoint>, ChartError> {
        if self.base.len() != dims.m || self.fiber.len() != dims.r {
            return Err(ChartError::invalid(format!(
                "grid has {} base axes and {} fiber rings; chart needs {} and {}",
                self.base.len(),
                self.fiber.len(),
                dims.m,
                dims.r
            )));
        }
        let base_axes: Vec<Vec<Complex64>> = self.base.iter().map(AxisGrid::points).collect();
        let fiber_rings: Vec<Vec<Complex64>> = self.fiber.iter().map(RingGrid::points).collect();
        let mut points = Vec::new();
        let mut stack: Vec<(Vec<Complex64>, Vec<Complex64>)> = vec![(vec![], vec![])];
        for axis in &base_axes {
            let mut next = Vec::with_capacity(stack.len() * axis.len());
            for (s, t) in &stack {
                for v in axis {
                    let mut s2 = s.clone();
                    s2.push(*v);
                    next.push((s2, t.clone()));
                }
            }
            stack = next;
        }
        for ring in &fiber_rings {
            let mut next = Vec::with_capacity(stack.len() * ring.len());
            for (s, t) in &stack {
                for v in ring {
                    let mut t2 = t.clone();
                    t2.push(*v);
                    next.push((s.clone(), t2));
                }
            }
            stack = next;
        }
        for (s, t) in stack {
            points.push(ChartPoint::new(dims, s, t));
        }
        Ok(points)
    }
}

/// Grid evaluation of one tensor: `values[point][pair][l]` in the
/// vertical frame.
#[derive(Debug, Clone)]
pub struct TensorGridEval {
    pub label: String,
    pub pairs: Vec<(usize, usize)>,
    pub points: Vec<ChartPoint>,
    pub values: Vec<Vec<Vec<Complex64>>>,
}

impl TensorGridEval {
    pub fn sup(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// One tensor entry of a report: grid sup, worst witness, and the
/// per-component breakdown.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TensorEntry {
    pub label: String,
    pub sup: f64,
    pub worst: Option<TensorWitness>,
    pub components: Vec<ComponentSup>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TensorWitness {
    pub base: Vec<[f64; 2]>,
    pub fiber: Vec<[f64; 2]>,
    pub pair: [usize; 2],
    pub component: usize,
    pub value: [f64; 2],
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ComponentSup {
    pub pair: [usize; 2],
    pub component: usize,
    pub sup: f64,
}

/// Sup-norms of the three tensors of one family, with the verdict.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CurvatureReport {
    pub tensors: Vec<TensorEntry>,
    pub tolerance: f64,
    pub harmonic_at_tolerance: bool,
}

impl CurvatureReport {
    pub fn from_evals(evals: &[TensorGridEval], tolerance: f64) -> CurvatureReport {
        let tensors: Vec<TensorEntry> = evals.iter().map(tensor_entry).collect();
        let harmonic_at_tolerance = tensors.iter().all(|t| t.sup < tolerance);
        CurvatureReport {
            tensors,
            tolerance,
            harmonic_at_tolerance,
        }
    }

    pub fn sup(&self, label: &str) -> Option<f64> {
        self.tensors.iter().find(|t| t.label == label).map(|t| t.sup)
    }
}

fn tensor_entry(eval: &TensorGridEval) -> TensorEntry {
    let mut sup: f64 = 0.0;
    let mut worst: Option<TensorWitness> = None;
    let mut components: Vec<ComponentSup> = Vec::new();
    for (pi, pair) in eval.pairs.iter().enumerate() {
        let r = eval
            .values
            .first()
            .map(|v| v[pi].len())
            .unwrap_or(0);
        for l in 0..r {
            let mut comp_sup: f64 = 0.0;
            for (point_idx, per_point) in eval.values.iter().enumerate() {
                let z = per_point[pi][l];
                let n = z.norm();
                comp_sup = comp_sup.max(n);
                if n > sup {
                    sup = n;
                    let p = &eval.points[point_idx];
                    worst = Some(TensorWitness {
                        base: p.s.iter().map(|z| [z.re, z.im]).collect(),
                        fiber: p.t.iter().map(|z| [z.re, z.im]).collect(),
                        pair: [pair.0, pair.1],
                        component: l,
                        value: [z.re, z.im],
                    });
                }
            }
            components.push(ComponentSup {
                pair: [pair.0, pair.1],
                component: l,
                sup: comp_sup,
            });
        }
    }
    TensorEntry {
        label: eval.label.clone(),
        sup,
        worst,
        components,
    }
}

fn unordered_pairs(m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            out.push((i, j));
        }
    }
    out
}

fn ordered_pairs(m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            out.push((i, j));
        }
    }
    out
}

/// `lb_i` applied to entry `(row, l)` of the jet `target`.
fn lbar_apply(dims: Dims, u: &MatJet, i: usize, target: &MatJet, row: usize, l: usize) -> Complex64 {
    let mut acc = target.d[Var::SBar(i).flat(dims)][(row, l)];
    for k in 0..dims.r {
        acc += u.value[(i, k)] * target.d[Var::T(k).flat(dims)][(row, l)];
    }
    acc
}

/// `l_i` applied to entry `(row, l)` of the jet `target`.
fn ell_apply(
    dims: Dims,
    c: &MatJet,
    cb: Option<&MatJet>,
    i: usize,
    target: &MatJet,
    row: usize,
    l: usize,
) -> Complex64 {
    let mut acc = target.d[Var::S(i).flat(dims)][(row, l)];
    for k in 0..dims.r {
        acc += c.value[(i, k)] * target.d[Var::T(k).flat(dims)][(row, l)];
    }
    if let Some(cb) = cb {
        for k in 0..dims.r {
            acc += cb.value[(i, k)] * target.d[Var::TBar(k).flat(dims)][(row, l)];
        }
    }
    acc
}

/// Vertical field of row `i` of `theta` applied to entry `(row, l)`.
fn vertical_apply(
    dims: Dims,
    theta: &MatJet,
    i: usize,
    target: &MatJet,
    row: usize,
    l: usize,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..dims.r {
        acc += theta.value[(i, k)] * target.d[Var::T(k).flat(dims)][(row, l)];
    }
    acc
}

fn f02_at(dims: Dims, u: &MatJet, pairs: &[(usize, usize)]) -> Vec<Vec<Complex64>> {
    pairs
        .iter()
        .map(|&(i, j)| {
            (0..dims.r)
                .map(|l| lbar_apply(dims, u, i, u, j, l) - lbar_apply(dims, u, j, u, i, l))
                .collect()
        })
        .collect()
}

fn f11_at(
    dims: Dims,
    u: &MatJet,
    c: &MatJet,
    cb: Option<&MatJet>,
    pairs: &[(usize, usize)],
) -> Vec<Vec<Complex64>> {
    pairs
        .iter()
        .map(|&(i, j)| {
            (0..dims.r)
                .map(|l| {
                    ell_apply(dims, c, cb, i, u, j, l) - lbar_apply(dims, u, j, c, i, l)
                })
                .collect()
        })
        .collect()
}

fn f20_at(
    dims: Dims,
    c: &MatJet,
    cb: Option<&MatJet>,
    pairs: &[(usize, usize)],
) -> Vec<Vec<Complex64>> {
    pairs
        .iter()
        .map(|&(i, j)| {
            (0..dims.r)
                .map(|l| {
                    ell_apply(dims, c, cb, i, c, j, l) - ell_apply(dims, c, cb, j, c, i, l)
                })
                .collect()
        })
        .collect()
}

fn g11_at(
    dims: Dims,
    u: &MatJet,
    theta: &MatJet,
    pairs: &[(usize, usize)],
) -> Vec<Vec<Complex64>> {
    pairs
        .iter()
        .map(|&(i, j)| {
            (0..dims.r)
                .map(|l| {
                    vertical_apply(dims, theta, i, u, j, l)
                        - lbar_apply(dims, u, j, theta, i, l)
                })
                .collect()
        })
        .collect()
}

fn g20_at(
    dims: Dims,
    theta: &MatJet,
    q_inv: &CMat,
    pairs: &[(usize, usize)],
) -> Vec<Vec<Complex64>> {
    pairs
        .iter()
        .map(|&(i, j)| {
            let raw: Vec<Complex64> = (0..dims.r)
                .map(|l| {
                    vertical_apply(dims, theta, i, theta, j, l)
                        - vertical_apply(dims, theta, j, theta, i, l)
                })
                .collect();
            (0..dims.r)
                .map(|l| (0..dims.r).map(|a| raw[a] * q_inv[(a, l)]).sum())
                .collect()
        })
        .collect()
}

/// Inverse frame matrix of the comparison map, as a coefficient matrix
/// ready for pointwise evaluation.
fn beta_inverse_matrix(dims: Dims, beta: &BetaMap) -> Result<CoeffMat, ChartError> {
    match beta {
        BetaMap::Identity { .. } => Ok(CoeffMat::identity(dims, dims.r)),
        BetaMap::VerticalLinear { q } => q.inverse(),
    }
}

/// Integrability tensor of a del-bar operator on the grid. The
/// coefficients must satisfy the local lifting condition; a zero lift
/// of the result then witnesses the bracket computation.
pub fn curvature_f02(
    d: &DBarChart,
    grid: &[ChartPoint],
) -> Result<TensorGridEval, ChartError> {
    if !d.satisfies_lifting_condition() {
        return Err(ChartError::LiftingConditionViolated {
            context: "del-bar coefficients depend on conjugate fiber variables",
        });
    }
    let dims = d.dims();
    let pairs = unordered_pairs(dims.m);
    let values: Vec<Vec<Vec<Complex64>>> = grid
        .par_iter()
        .map(|p| {
            let uj = d.u().eval_jet(p)?;
            Ok(f02_at(dims, &uj, &pairs))
        })
        .collect::<Result<_, ChartError>>()?;
    Ok(TensorGridEval {
        label: "F02".into(),
        pairs,
        points: grid.to_vec(),
        values,
    })
}

/// Holomorphy tensor of an almost connection against the background
/// complex structure: the value at `(i, j)` is the vertical part of
/// the bracket of the lift of `d/ds_i` with `d/dsb_j`, which reduces
/// to `-d c_il / d sb_j`.
pub fn curvature_f11(
    conn: &ConnectionChart,
    grid: &[ChartPoint],
) -> Result<TensorGridEval, ChartError> {
    let dims = conn.dims();
    let sample = &grid[..grid.len().min(5)];
    if !conn.is_holomorphic_vertical(sample)? {
        return Err(ChartError::NotHolomorphic {
            context: "connection coefficients along conjugate fiber directions",
        });
    }
    let background = DBarChart::new(dims, CoeffMat::zeros(dims, dims.m, dims.r))?;
    flat_f11(&background, conn, grid)
}

fn flat_f11(
    dbar: &DBarChart,
    conn: &ConnectionChart,
    grid: &[ChartPoint],
) -> Result<TensorGridEval, ChartError> {
    let dims = conn.dims();
    let pairs = ordered_pairs(dims.m);
    let values: Vec<Vec<Vec<Complex64>>> = grid
        .par_iter()
        .map(|p| {
            let uj = dbar.u().eval_jet(p)?;
            let (cj, cbj) = conn.jet(p)?;
            Ok(f11_at(dims, &uj, &cj, cbj.as_ref(), &pairs))
        })
        .collect::<Result<_, ChartError>>()?;
    Ok(TensorGridEval {
        label: "F11".into(),
        pairs,
        points: grid.to_vec(),
        values,
    })
}

/// Flatness tensor of an almost connection: the vertical part of the
/// bracket of two lifts.
pub fn curvature_f20(
    conn: &ConnectionChart,
    grid: &[ChartPoint],
) -> Result<TensorGridEval, ChartError> {
    let dims = conn.dims();
    let pairs = unordered_pairs(dims.m);
    let values: Vec<Vec<Vec<Complex64>>> = grid
        .par_iter()
        .map(|p| {
            let (cj, cbj) = conn.jet(p)?;
            Ok(f20_at(dims, &cj, cbj.as_ref(), &pairs))
        })
        .collect::<Result<_, ChartError>>()?;
    Ok(TensorGridEval {
        label: "F20".into(),
        pairs,
        points: grid.to_vec(),
        values,
    })
}

/// All three tensors of a flat pair on the grid.
pub fn flat_pair_tensors(
    dbar: &DBarChart,
    conn: &ConnectionChart,
    grid: &[ChartPoint],
) -> Result<Vec<TensorGridEval>, ChartError> {
    let f02 = curvature_f02(dbar, grid)?;
    let f11 = flat_f11(dbar, conn, grid)?;
    let f20 = curvature_f20(conn, grid)?;
    Ok(vec![f02, f11, f20])
}

/// All three tensors of a Higgs pair on the grid: integrability of the
/// del-bar operator, holomorphy of the field, and its self-bracket in
/// the comparison frame.
pub fn higgs_pair_tensors(
    dbar: &DBarChart,
    theta: &HiggsChart,
    beta: &BetaMap,
    grid: &[ChartPoint],
) -> Result<Vec<TensorGridEval>, ChartError> {
    let dims = theta.dims();
    let mut g02 = curvature_f02(dbar, grid)?;
    g02.label = "G02".into();

    let pairs11 = ordered_pairs(dims.m);
    let values11: Vec<Vec<Vec<Complex64>>> = grid
        .par_iter()
        .map(|p| {
            let uj = dbar.u().eval_jet(p)?;
            let thj = theta.theta().eval_jet(p)?;
            Ok(g11_at(dims, &uj, &thj, &pairs11))
        })
        .collect::<Result<_, ChartError>>()?;
    let g11 = TensorGridEval {
        label: "G11".into(),
        pairs: pairs11,
        points: grid.to_vec(),
        values: values11,
    };

    let q_inv_mat = beta_inverse_matrix(dims, beta)?;
    let pairs20 = unordered_pairs(dims.m);
    let values20: Vec<Vec<Vec<Complex64>>> = grid
        .par_iter()
        .map(|p| {
            let thj = theta.theta().eval_jet(p)?;
            let qi = q_inv_mat.eval(p)?;
            Ok(g20_at(dims, &thj, &qi, &pairs20))
        })
        .collect::<Result<_, ChartError>>()?;
    let g20 = TensorGridEval {
        label: "G20".into(),
        pairs: pairs20,
        points: grid.to_vec(),
        values: values20,
    };

    Ok(vec![g02, g11, g20])
}

/// Forward verdict: transform Higgs data over the canonical chart
/// del-bar operator and evaluate the flat-side tensors. The report
/// says whether the output pair defines a holomorphic flat bundle at
/// tolerance.
pub fn assemble_f(
    theta: &HiggsChart,
    metric: &MetricChart,
    beta: &BetaMap,
    realform: &RealFormSpec,
    grid: &[ChartPoint],
    tol: f64,
) -> Result<(CurvatureReport, SimpsonFlat), ChartError> {
    let dims = theta.dims();
    let dbar_g = DBarChart::new(dims, CoeffMat::zeros(dims, dims.m, dims.r))?;
    let flat = higgs_to_flat(theta, &dbar_g, metric, beta, realform)?;
    let evals = flat_pair_tensors(&flat.dbar, &flat.nabla, grid)?;
    Ok((CurvatureReport::from_evals(&evals, tol), flat))
}

/// Backward verdict: transform a flat pair and evaluate the Higgs-side
/// tensors. The report says whether the output pair defines a
/// holomorphic Higgs bundle at tolerance.
pub fn assemble_g(
    nabla: &ConnectionChart,
    dbar_f: &DBarChart,
    metric: &MetricChart,
    beta: &BetaMap,
    realform: &RealFormSpec,
    grid: &[ChartPoint],
    tol: f64,
) -> Result<(CurvatureReport, SimpsonHiggs), ChartError> {
    let higgs = flat_to_higgs(nabla, dbar_f, metric, beta, realform)?;
    let evals = higgs_pair_tensors(&higgs.dbar, &higgs.theta, beta, grid)?;
    Ok((CurvatureReport::from_evals(&evals, tol), higgs))
}

/// Which side of the correspondence a harmonicity query starts from.
#[derive(Debug, Clone)]
pub enum HarmonicInput {
    HiggsSide {
        theta: HiggsChart,
        metric: MetricChart,
        beta: BetaMap,
        realform: RealFormSpec,
    },
    FlatSide {
        nabla: ConnectionChart,
        dbar: DBarChart,
        metric: MetricChart,
        beta: BetaMap,
        realform: RealFormSpec,
    },
}

/// Individual allowability checks: each failure is named so reports
/// can point at the violated hypothesis.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AllowabilityReport {
    pub beta_residual: f64,
    pub beta_preserves_form: bool,
    pub chern_vertical_holomorphic: bool,
    pub conjugation_defined: bool,
    pub metric_positive_on_grid: bool,
    pub failures: Vec<String>,
    pub allowable: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct HarmonicityReport {
    pub allowability: AllowabilityReport,
    pub curvature: Option<CurvatureReport>,
    pub harmonic: bool,
}

/// Full harmonic-metric verdict: allowability first, then the
/// relevant tensor family of the transformed data. A passing report
/// certifies the quadruple of chart data as a nonlinear harmonic
/// bundle on the sampled domain.
pub fn is_harmonic(
    input: &HarmonicInput,
    grid: &Grid,
    tol: f64,
) -> Result<HarmonicityReport, ChartError> {
    let (metric, beta) = match input {
        HarmonicInput::HiggsSide { metric, beta, .. } => (metric, beta),
        HarmonicInput::FlatSide { metric, beta, .. } => (metric, beta),
    };
    let dims = metric.dims();
    let points = grid.points(dims)?;
    let mut failures = Vec::new();

    let mut metric_positive = true;
    for p in &points {
        if !metric.fiber_positive_at(p)? {
            metric_positive = false;
            failures.push(format!(
                "metric not positive on fiber directions at s={:?}, t={:?}",
                p.s, p.t
            ));
            break;
        }
    }

    let beta_residual = beta.form_preservation_residual(metric, &points)?;
    let beta_ok = beta_residual < tol.max(1e-9);
    if !beta_ok {
        failures.push(format!(
            "comparison map moves the form (residual {beta_residual:.3e})"
        ));
    }

    let sample = &points[..points.len().min(5)];
    let mut conjugation_defined = true;
    let mut chern_ok = true;
    let mut curvature = None;

    if metric_positive {
        match input {
            HarmonicInput::HiggsSide {
                theta, realform, ..
            } => {
                match assemble_f(theta, metric, beta, realform, &points, tol) {
                    Ok((report, flat)) => {
                        chern_ok = flat.chern.is_holomorphic_vertical(sample)?;
                        curvature = Some(report);
                    }
                    Err(ChartError::ConjugationUndefined) => {
                        conjugation_defined = false;
                        failures.push(
                            "conjugation undefined: supply custom real form".into(),
                        );
                    }
                    Err(e) => return Err(e),
                }
            }
            HarmonicInput::FlatSide {
                nabla,
                dbar,
                realform,
                ..
            } => {
                let chern_conn = crate::chern::chern_connection(metric.clone(), dbar.clone())?;
                chern_ok = chern_conn.is_holomorphic_vertical(sample)?;
                match assemble_g(nabla, dbar, metric, beta, realform, &points, tol) {
                    Ok((report, _)) => curvature = Some(report),
                    Err(ChartError::ConjugationUndefined) => {
                        conjugation_defined = false;
                        failures.push(
                            "conjugation undefined: supply custom real form".into(),
                        );
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    if !chern_ok {
        failures.push("metric connection is not holomorphic along vertical directions".into());
    }

    let allowable = metric_positive && beta_ok && chern_ok && conjugation_defined;
    let harmonic = allowable
        && curvature
            .as_ref()
            .map(|c| c.harmonic_at_tolerance)
            .unwrap_or(false);
    Ok(HarmonicityReport {
        allowability: AllowabilityReport {
            beta_residual,
            beta_preserves_form: beta_ok,
            chern_vertical_holomorphic: chern_ok,
            conjugation_defined,
            metric_positive_on_grid: metric_positive,
            failures,
            allowable,
        },
        curvature,
        harmonic,
    })
}

/// A tensor in closed form: one row of vertical coefficients per index
/// pair. Built from symbolic Lie brackets of the frame fields, so it
/// is an independent route against the jet evaluators.
#[derive(Debug, Clone)]
pub struct Tensor2 {
    pub label: String,
    pub pairs: Vec<(usize, usize)>,
    pub rows: CoeffMat,
}

impl Tensor2 {
    pub fn eval(&self, p: &ChartPoint) -> Result<Vec<Vec<Complex64>>, ChartError> {
        let v = self.rows.eval(p)?;
        Ok(self
            .pairs
            .iter()
            .enumerate()
            .map(|(pi, _)| (0..v.ncols()).map(|l| v[(pi, l)]).collect())
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_zero()
    }
}

fn bracket_rows<F, G>(
    dims: Dims,
    label: &str,
    pairs: Vec<(usize, usize)>,
    fields: F,
    second: Option<G>,
) -> Tensor2
where
    F: Fn(usize) -> crate::symcore::VectorFieldChart,
    G: Fn(usize) -> crate::symcore::VectorFieldChart,
{
    let mut rows = CoeffMat::zeros(dims, pairs.len(), dims.r);
    for (pi, &(i, j)) in pairs.iter().enumerate() {
        let a = fields(i);
        let b = match &second {
            Some(g) => g(j),
            None => fields(j),
        };
        let w = lie_bracket(&a, &b);
        for l in 0..dims.r {
            rows.set(pi, l, w.coeff(Var::T(l)).clone());
        }
    }
    Tensor2 {
        label: label.into(),
        pairs,
        rows,
    }
}

/// Closed-form F02: vertical components of brackets of the del-bar
/// lifts.
pub fn f02_symbolic(d: &DBarChart) -> Tensor2 {
    let dims = d.dims();
    bracket_rows(
        dims,
        "F02",
        unordered_pairs(dims.m),
        |i| d.lift(i),
        None::<fn(usize) -> crate::symcore::VectorFieldChart>,
    )
}

/// Closed-form F11 of a pair: brackets of connection lifts with
/// del-bar lifts. Needs a closed-form connection.
pub fn f11_symbolic(d: &DBarChart, conn: &ConnectionChart) -> Result<Tensor2, ChartError> {
    let dims = conn.dims();
    let lifts: Vec<_> = (0..dims.m)
        .map(|i| conn.lift(i))
        .collect::<Result<_, _>>()?;
    Ok(bracket_rows(
        dims,
        "F11",
        ordered_pairs(dims.m),
        move |i| lifts[i].clone(),
        Some(|j| d.lift(j)),
    ))
}

/// Closed-form F20: brackets of connection lifts.
pub fn f20_symbolic(conn: &ConnectionChart) -> Result<Tensor2, ChartError> {
    let dims = conn.dims();
    let lifts: Vec<_> = (0..dims.m)
        .map(|i| conn.lift(i))
        .collect::<Result<_, _>>()?;
    Ok(bracket_rows(
        dims,
        "F20",
        unordered_pairs(dims.m),
        move |i| lifts[i].clone(),
        None::<fn(usize) -> crate::symcore::VectorFieldChart>,
    ))
}
