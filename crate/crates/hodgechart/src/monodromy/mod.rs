//! Nonlinear flat connections in practice: rational-ODE foliations,
//! analytic continuation along base paths, and loop monodromy.
//!
//! An order-`n` rational ODE `t^(n) = F(s, t, t', ..., t^(n-1))`
//! becomes a connection chart on the trivial bundle with fiber
//! coordinates `(t_0, ..., t_{n-1})` and horizontal lift
//! `d/ds + t_1 d/dt_0 + ... + F d/dt_{n-1}`. Continuation integrates
//! the lift along a path; monodromy continues a family of initial
//! conditions around a closed loop. For nonlinear `F` the result is a
//! partially defined self-map of the fiber rather than a linear
//! representation, so escapes along the way are recorded as data.

pub mod polyauto;

pub use polyauto::{compose_polyauto, jacobian_degree_growth, PolyAuto, WordDegree};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bundles::ConnectionChart;
use crate::error::ChartError;
use crate::symcore::{CMat, ChartPoint, CoeffFn, CoeffMat, Dims, Var, WirtingerPoly};

/// `t^(n) = F` with `F = num / den`. The numerator may involve all
/// derivative coordinates; the denominator only `s` and `t_0`.
#[derive(Debug, Clone)]
pub struct RationalODE {
    n: usize,
    num: WirtingerPoly,
    den: WirtingerPoly,
}

impl RationalODE {
    pub fn new(n: usize, num: WirtingerPoly, den: WirtingerPoly) -> Result<RationalODE, ChartError> {
        if n == 0 {
            return Err(ChartError::invalid("ODE order must be at least one"));
        }
        let dims = Dims::new(1, n);
        num.dims().check_eq(dims, "ODE numerator")?;
        den.dims().check_eq(dims, "ODE denominator")?;
        if !num.is_holomorphic() || !den.is_holomorphic() {
            return Err(ChartError::invalid(
                "ODE coefficients must be holomorphic in all variables",
            ));
        }
        for k in 1..n {
            if den.uses_var(Var::T(k)) {
                return Err(ChartError::invalid(
                    "ODE denominator may only involve the base variable and t0",
                ));
            }
        }
        if den.is_zero() {
            return Err(ChartError::invalid("ODE denominator is identically zero"));
        }
        Ok(RationalODE { n, num, den })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> Dims {
        Dims::new(1, self.n)
    }
}

/// The foliation chart of the ODE: a connection whose single
/// horizontal lift encodes the order-`n` equation as a first-order
/// system.
pub fn ode_to_foliation(ode: &RationalODE) -> Result<ConnectionChart, ChartError> {
    let dims = ode.dims();
    let mut c = CoeffMat::zeros(dims, 1, ode.n);
    for k in 0..ode.n - 1 {
        c.set(0, k, CoeffFn::from(WirtingerPoly::variable(dims, Var::T(k + 1))));
    }
    c.set(0, ode.n - 1, CoeffFn::rational(ode.num.clone(), ode.den.clone()));
    ConnectionChart::explicit(dims, c)
}

/// One leg of a base path.
#[derive(Debug, Clone)]
pub enum PathSegment {
    Line {
        from: Complex64,
        to: Complex64,
    },
    /// Angles in radians; the span may exceed a full turn.
    Arc {
        center: Complex64,
        radius: f64,
        start_angle: f64,
        end_angle: f64,
    },
}

impl PathSegment {
    fn at(&self, sigma: f64) -> Complex64 {
        match self {
            PathSegment::Line { from, to } => from + sigma * (to - from),
            PathSegment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
            } => {
                let phi = start_angle + sigma * (end_angle - start_angle);
                center + radius * Complex64::new(phi.cos(), phi.sin())
            }
        }
    }

    fn velocity(&self, sigma: f64) -> Complex64 {
        match self {
            PathSegment::Line { from, to } => to - from,
            PathSegment::Arc {
                center: _,
                radius,
                start_angle,
                end_angle,
            } => {
                let span = end_angle - start_angle;
                let phi = start_angle + sigma * span;
                Complex64::new(0.0, span * radius) * Complex64::new(phi.cos(), phi.sin())
            }
        }
    }

    fn distance_to(&self, p: Complex64) -> f64 {
        match self {
            PathSegment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                if len2 == 0.0 {
                    return (p - from).norm();
                }
                let u = ((p - from) * d.conj()).re / len2;
                let u = u.clamp(0.0, 1.0);
                (p - (from + u * d)).norm()
            }
            PathSegment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
            } => {
                let span = (end_angle - start_angle).abs();
                let radial = ((p - center).norm() - radius).abs();
                if span >= 2.0 * std::f64::consts::PI {
                    return radial;
                }
                let lo = start_angle.min(*end_angle);
                let theta = (p - center).arg();
                let tau = 2.0 * std::f64::consts::PI;
                let rel = (theta - lo).rem_euclid(tau);
                if rel <= span {
                    radial
                } else {
                    (p - self.at(0.0)).norm().min((p - self.at(1.0)).norm())
                }
            }
        }
    }

    fn split(&self, k: usize) -> Vec<PathSegment> {
        (0..k)
            .map(|i| {
                let a = i as f64 / k as f64;
                let b = (i + 1) as f64 / k as f64;
                match self {
                    PathSegment::Line { .. } => PathSegment::Line {
                        from: self.at(a),
                        to: self.at(b),
                    },
                    PathSegment::Arc {
                        center,
                        radius,
                        start_angle,
                        end_angle,
                    } => PathSegment::Arc {
                        center: *center,
                        radius: *radius,
                        start_angle: start_angle + a * (end_angle - start_angle),
                        end_angle: start_angle + b * (end_angle - start_angle),
                    },
                }
            })
            .collect()
    }
}

/// A polyline-and-arc path in the base plane with declared punctures
/// to stay away from.
#[derive(Debug, Clone)]
pub struct BasePath {
    pub segments: Vec<PathSegment>,
    pub punctures: Vec<Complex64>,
    pub margin: f64,
}

impl BasePath {
    pub fn polyline(points: &[Complex64]) -> BasePath {
        let segments = points
            .windows(2)
            .map(|w| PathSegment::Line { from: w[0], to: w[1] })
            .collect();
        BasePath {
            segments,
            punctures: Vec::new(),
            margin: 1e-3,
        }
    }

    /// A circular loop; `turns` may be negative or larger than one.
    pub fn circle(center: Complex64, radius: f64, start_angle: f64, turns: f64) -> BasePath {
        BasePath {
            segments: vec![PathSegment::Arc {
                center,
                radius,
                start_angle,
                end_angle: start_angle + turns * 2.0 * std::f64::consts::PI,
            }],
            punctures: Vec::new(),
            margin: 1e-3,
        }
    }

    pub fn with_punctures(mut self, punctures: Vec<Complex64>, margin: f64) -> BasePath {
        self.punctures = punctures;
        self.margin = margin;
        self
    }

    pub fn then(mut self, other: BasePath) -> BasePath {
        self.segments.extend(other.segments);
        self
    }

    pub fn start(&self) -> Complex64 {
        self.segments[0].at(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.segments.last().unwrap().at(1.0)
    }

    pub fn is_closed(&self, tol: f64) -> bool {
        (self.start() - self.end()).norm() <= tol
    }

    /// Each segment split into `k` pieces; the same curve, finer
    /// discretization.
    pub fn refine(&self, k: usize) -> BasePath {
        BasePath {
            segments: self.segments.iter().flat_map(|s| s.split(k.max(1))).collect(),
            punctures: self.punctures.clone(),
            margin: self.margin,
        }
    }

    pub fn validate(&self) -> Result<(), ChartError> {
        if self.segments.is_empty() {
            return Err(ChartError::invalid("path has no segments"));
        }
        for p in &self.punctures {
            let d = self
                .segments
                .iter()
                .map(|seg| seg.distance_to(*p))
                .fold(f64::INFINITY, f64::min);
            if d < self.margin {
                return Err(ChartError::PathTooClose {
                    distance: d,
                    margin: self.margin,
                });
            }
        }
        Ok(())
    }
}

/// Adaptive integrator controls. Defaults match the continuation
/// oracles: absolute and relative tolerance 1e-10, escape at 1e8.
#[derive(Debug, Clone)]
pub struct IntegratorOptions {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
    pub escape_norm: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            atol: 1e-10,
            rtol: 1e-10,
            max_steps: 200_000,
            escape_norm: 1e8,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct SegmentProblem<'a> {
    row: &'a CoeffMat,
    dims: Dims,
    segment: &'a PathSegment,
}

impl SegmentProblem<'_> {
    /// dy/dsigma = s'(sigma) * C(s(sigma), y)
    fn rhs(&self, sigma: f64, y: &[Complex64]) -> Result<Vec<Complex64>, ChartError> {
        let s = self.segment.at(sigma);
        let v = self.segment.velocity(sigma);
        let p = ChartPoint::new(self.dims, vec![s], y.to_vec());
        let mut out = Vec::with_capacity(y.len());
        for k in 0..y.len() {
            let c = self.row.get(0, k).eval(&p).map_err(|e| match e {
                ChartError::DenominatorVanishes { s, .. } => ChartError::PoleProximity {
                    s: s[0],
                    den: 1e-12,
                },
                other => other,
            })?;
            out.push(v * c);
        }
        Ok(out)
    }
}

fn integrate_segment(
    problem: &SegmentProblem<'_>,
    mut y: Vec<Complex64>,
    opts: &IntegratorOptions,
    steps_used: &mut usize,
) -> Result<Vec<Complex64>, ChartError> {
    let n = y.len();
    let mut sigma = 0.0_f64;
    let mut h = 0.05_f64;
    while sigma < 1.0 - 1e-14 {
        if *steps_used >= opts.max_steps {
            return Err(ChartError::TooManySteps {
                max_steps: opts.max_steps,
            });
        }
        *steps_used += 1;
        h = h.min(1.0 - sigma);
        if h < 1e-13 {
            return Err(ChartError::StepCollapse {
                s: problem.segment.at(sigma),
            });
        }

        let mut k: Vec<Vec<Complex64>> = Vec::with_capacity(7);
        k.push(problem.rhs(sigma, &y)?);
        for stage in 1..7 {
            let mut ys = y.clone();
            for (si, ks) in k.iter().enumerate() {
                let a = DP_A[stage][si];
                if a != 0.0 {
                    for i in 0..n {
                        ys[i] += h * a * ks[i];
                    }
                }
            }
            k.push(problem.rhs(sigma + DP_C[stage] * h, &ys)?);
        }

        let mut y5 = y.clone();
        let mut err_num = 0.0_f64;
        let mut errs = vec![Complex64::new(0.0, 0.0); n];
        for (si, ks) in k.iter().enumerate() {
            for i in 0..n {
                y5[i] += h * DP_B5[si] * ks[i];
                errs[i] += h * (DP_B5[si] - DP_B4[si]) * ks[i];
            }
        }
        for i in 0..n {
            let sc = opts.atol + opts.rtol * y[i].norm().max(y5[i].norm());
            let e = errs[i].norm() / sc;
            err_num += e * e;
        }
        let err = (err_num / n as f64).sqrt();

        if err <= 1.0 {
            sigma += h;
            y = y5;
            let sup = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if sup > opts.escape_norm {
                return Err(ChartError::Escaped {
                    s: problem.segment.at(sigma),
                    norm: sup,
                });
            }
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(y)
}

/// Analytic continuation of the local solution with initial condition
/// `t0` at the start of the path.
pub fn continue_along_path(
    fol: &ConnectionChart,
    path: &BasePath,
    t0: &[Complex64],
) -> Result<Vec<Complex64>, ChartError> {
    continue_with_options(fol, path, t0, &IntegratorOptions::default())
}

pub fn continue_with_options(
    fol: &ConnectionChart,
    path: &BasePath,
    t0: &[Complex64],
    opts: &IntegratorOptions,
) -> Result<Vec<Complex64>, ChartError> {
    let dims = fol.dims();
    if dims.m != 1 {
        return Err(ChartError::invalid(
            "continuation needs a one-dimensional base",
        ));
    }
    if t0.len() != dims.r {
        return Err(ChartError::invalid(format!(
            "initial condition has {} components; fiber has {}",
            t0.len(),
            dims.r
        )));
    }
    path.validate()?;
    let row = fol.symbolic_c()?;
    let mut y = t0.to_vec();
    let mut steps = 0usize;
    for segment in &path.segments {
        let problem = SegmentProblem {
            row: &row,
            dims,
            segment,
        };
        y = integrate_segment(&problem, y, opts, &mut steps)?;
    }
    Ok(y)
}

/// Loop monodromy data: per-sample transport results, and for
/// fiberwise-linear foliations the fitted matrix in the row-vector
/// convention `out = in * M` (path concatenation multiplies on the
/// right).
#[derive(Debug)]
pub struct MonodromyResult {
    pub samples: Vec<(Vec<Complex64>, Result<Vec<Complex64>, ChartError>)>,
    pub matrix: Option<(CMat, f64)>,
}

/// Transport every sample around the closed loop. Escapes and
/// rejections are recorded per sample.
pub fn loop_monodromy(
    fol: &ConnectionChart,
    path: &BasePath,
    samples: &[Vec<Complex64>],
) -> Result<MonodromyResult, ChartError> {
    let gap = (path.start() - path.end()).norm();
    if gap > 1e-12 {
        return Err(ChartError::PathNotClosed { gap });
    }
    path.validate()?;
    let outcomes: Vec<(Vec<Complex64>, Result<Vec<Complex64>, ChartError>)> = samples
        .par_iter()
        .map(|t0| (t0.clone(), continue_along_path(fol, path, t0)))
        .collect();

    let matrix = if fiber_linear_matrix(&fol.symbolic_c()?).is_some() {
        fit_linear_monodromy(fol.dims().r, &outcomes)
    } else {
        None
    };
    Ok(MonodromyResult {
        samples: outcomes,
        matrix,
    })
}

/// The coefficient matrix of a fiberwise-linear foliation row, if the
/// row is homogeneous linear in the fiber variables.
pub fn fiber_linear_matrix(row: &CoeffMat) -> Option<CoeffMat> {
    let dims = row.dims();
    let r = dims.r;
    let mut m = CoeffMat::zeros(dims, r, r);
    for k in 0..r {
        for j in 0..r {
            m.set(j, k, row.get(0, k).wirtinger_derive(Var::T(j)));
        }
    }
    if !m.is_fiber_free() {
        return None;
    }
    let rebuilt = CoeffMat::fiber_row(dims).mul(&m);
    if rebuilt.semantic_eq(row) {
        Some(m)
    } else {
        None
    }
}

fn fit_linear_monodromy(
    r: usize,
    outcomes: &[(Vec<Complex64>, Result<Vec<Complex64>, ChartError>)],
) -> Option<(CMat, f64)> {
    let good: Vec<(&Vec<Complex64>, &Vec<Complex64>)> = outcomes
        .iter()
        .filter_map(|(t0, res)| res.as_ref().ok().map(|out| (t0, out)))
        .collect();
    if good.len() < r {
        return None;
    }
    let x = CMat::from_fn(good.len(), r, |i, j| *good[i].0.get(j).unwrap());
    let y = CMat::from_fn(good.len(), r, |i, j| *good[i].1.get(j).unwrap());
    let svd = x.clone().svd(true, true);
    let m = svd.solve(&y, 1e-13).ok()?;
    let resid = (&x * &m - &y)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Some((m, resid))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sqrt_ode() -> RationalODE {
        // t' = t / (2s)
        let dims = Dims::new(1, 1);
        let t = WirtingerPoly::variable(dims, Var::T(0));
        let s = WirtingerPoly::variable(dims, Var::S(0));
        RationalODE::new(1, t, s.scale(c(2.0, 0.0))).unwrap()
    }

    fn riccati_ode() -> RationalODE {
        // t' = t^2
        let dims = Dims::new(1, 1);
        let t = WirtingerPoly::variable(dims, Var::T(0));
        RationalODE::new(1, t.mul(&t), WirtingerPoly::one(dims)).unwrap()
    }

    fn unit_loop() -> BasePath {
        BasePath::circle(c(0.0, 0.0), 1.0, 0.0, 1.0).with_punctures(vec![c(0.0, 0.0)], 0.1)
    }

    #[test]
    fn zero_field_transports_identically() {
        let dims = Dims::new(1, 1);
        let ode = RationalODE::new(
            1,
            WirtingerPoly::constant(dims, c(0.0, 0.0)),
            WirtingerPoly::one(dims),
        )
        .unwrap();
        let fol = ode_to_foliation(&ode).unwrap();
        let out = continue_along_path(&fol, &unit_loop(), &[c(0.7, -0.3)]).unwrap();
        assert_eq!(out[0], c(0.7, -0.3));
    }

    #[test]
    fn square_root_branch_flips_after_one_loop() {
        let fol = ode_to_foliation(&sqrt_ode()).unwrap();
        let out = continue_along_path(&fol, &unit_loop(), &[c(1.0, 0.0)]).unwrap();
        assert!((out[0] - c(-1.0, 0.0)).norm() < 1e-8, "{out:?}");
    }

    #[test]
    fn square_root_branch_restores_after_two_loops() {
        let fol = ode_to_foliation(&sqrt_ode()).unwrap();
        let double = BasePath::circle(c(0.0, 0.0), 1.0, 0.0, 2.0);
        let out = continue_along_path(&fol, &double, &[c(1.0, 0.0)]).unwrap();
        assert!((out[0] - c(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn riccati_flow_matches_the_closed_form() {
        // t(s) = t0 / (1 - t0 s)
        let fol = ode_to_foliation(&riccati_ode()).unwrap();
        let path = BasePath::polyline(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let out = continue_along_path(&fol, &path, &[c(0.5, 0.0)]).unwrap();
        assert!((out[0] - c(1.0, 0.0)).norm() < 1e-8, "{out:?}");
    }

    #[test]
    fn blowup_escapes_with_the_parameter_reported() {
        let fol = ode_to_foliation(&riccati_ode()).unwrap();
        let path = BasePath::polyline(&[c(0.0, 0.0), c(2.0, 0.0)]);
        let err = continue_along_path(&fol, &path, &[c(1.0, 0.0)]).unwrap_err();
        match err {
            ChartError::Escaped { s, norm } => {
                assert!((s - c(1.0, 0.0)).norm() < 0.1, "escape near the pole, got {s}");
                assert!(norm > 1e8);
            }
            other => panic!("expected escape, got {other}"),
        }
    }

    #[test]
    fn declared_punctures_reject_crossing_paths() {
        let fol = ode_to_foliation(&sqrt_ode()).unwrap();
        let path = BasePath::polyline(&[c(-1.0, 0.0), c(1.0, 0.0)])
            .with_punctures(vec![c(0.0, 0.0)], 0.05);
        let err = continue_along_path(&fol, &path, &[c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, ChartError::PathTooClose { .. }));
    }

    #[test]
    fn starting_on_a_pole_is_rejected() {
        let fol = ode_to_foliation(&sqrt_ode()).unwrap();
        let path = BasePath::polyline(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let err = continue_along_path(&fol, &path, &[c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, ChartError::PoleProximity { .. }));
    }

    #[test]
    fn linear_loops_fit_the_monodromy_matrix() {
        let fol = ode_to_foliation(&sqrt_ode()).unwrap();
        let samples = vec![
            vec![c(1.0, 0.0)],
            vec![c(0.5, 0.5)],
            vec![c(-0.25, 1.0)],
        ];
        let res = loop_monodromy(&fol, &unit_loop(), &samples).unwrap();
        let (m, resid) = res.matrix.expect("linear fit");
        assert!((m[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-8);
        assert!(resid < 1e-8);
        for (t0, out) in &res.samples {
            assert!((out.as_ref().unwrap()[0] + t0[0]).norm() < 1e-8);
        }
    }

    #[test]
    fn loop_concatenation_multiplies_matrices_on_the_right() {
        let fol = ode_to_foliation(&sqrt_ode()).unwrap();
        let single = unit_loop();
        let double = single.clone().then(unit_loop());
        let samples = vec![vec![c(1.0, 0.0)], vec![c(0.0, 1.0)]];
        let m1 = loop_monodromy(&fol, &single, &samples).unwrap().matrix.unwrap().0;
        let m2 = loop_monodromy(&fol, &double, &samples).unwrap().matrix.unwrap().0;
        let prod = &m1 * &m1;
        assert!((&m2 - &prod).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-8);
    }

    #[test]
    fn nonlinear_loops_have_no_matrix_but_single_valued_outputs() {
        // t' = t^2 around a loop that encloses no singularity of the
        // flow: solutions are single-valued there
        let fol = ode_to_foliation(&riccati_ode()).unwrap();
        let path = BasePath::circle(c(2.0, 2.0), 0.5, 0.0, 1.0);
        let samples = vec![vec![c(0.1, 0.0)], vec![c(0.0, 0.2)]];
        let res = loop_monodromy(&fol, &path, &samples).unwrap();
        assert!(res.matrix.is_none());
        for (t0, out) in &res.samples {
            assert!((out.as_ref().unwrap()[0] - t0[0]).norm() < 1e-8);
        }
    }

    #[test]
    fn open_paths_are_rejected_for_monodromy() {
        let fol = ode_to_foliation(&sqrt_ode()).unwrap();
        let path = BasePath::polyline(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let err = loop_monodromy(&fol, &path, &[vec![c(1.0, 0.0)]]).unwrap_err();
        assert!(matches!(err, ChartError::PathNotClosed { .. }));
    }

    #[test]
    fn refining_the_path_does_not_move_the_result() {
        let fol = ode_to_foliation(&sqrt_ode()).unwrap();
        let coarse = unit_loop();
        let fine = coarse.refine(4);
        let a = continue_along_path(&fol, &coarse, &[c(1.0, 0.0)]).unwrap();
        let b = continue_along_path(&fol, &fine, &[c(1.0, 0.0)]).unwrap();
        assert!((a[0] - b[0]).norm() < 1e-9);
    }

    #[test]
    fn order_two_equations_unfold_to_first_order_systems() {
        // t'' = t0^2 becomes the row (t1, t0^2)
        let dims = Dims::new(1, 2);
        let t0 = WirtingerPoly::variable(dims, Var::T(0));
        let ode = RationalODE::new(2, t0.mul(&t0), WirtingerPoly::one(dims)).unwrap();
        let fol = ode_to_foliation(&ode).unwrap();
        let row = fol.symbolic_c().unwrap();
        assert!(row
            .get(0, 0)
            .semantic_eq(&CoeffFn::variable(dims, Var::T(1))));
        assert!(row.get(0, 1).semantic_eq(&CoeffFn::from(t0.mul(&t0))));
        assert!(fiber_linear_matrix(&row).is_none());
    }

    #[test]
    fn denominators_with_derivative_coordinates_are_rejected() {
        let dims = Dims::new(1, 2);
        let t1 = WirtingerPoly::variable(dims, Var::T(1));
        assert!(RationalODE::new(2, WirtingerPoly::one(dims), t1).is_err());
    }

    #[test]
    fn arc_distance_accounts_for_angular_extent() {
        let half = PathSegment::Arc {
            center: c(0.0, 0.0),
            radius: 1.0,
            start_angle: 0.0,
            end_angle: std::f64::consts::PI,
        };
        // point on the circle but outside the half-arc: the nearest
        // points are the endpoints (1, 0) and (-1, 0)
        let below = c(0.0, -1.0);
        assert!((half.distance_to(below) - 2.0_f64.sqrt()).abs() < 1e-12);
        let on = c(0.0, 1.0);
        assert!(half.distance_to(on) < 1e-12);
    }
}
