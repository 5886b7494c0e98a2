//! Scenario dispatch: convert parsed scenarios into engine calls and
//! collect machine-readable results.

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use hodgechart::bundles::{ConnectionChart, DBarChart, HiggsChart};
use hodgechart::chern::{
    chern_connection, metric_from_linear_hermitian, orthogonality_residual, MetricChart,
};
use hodgechart::conjugation::RealFormSpec;
use hodgechart::curvature::{
    assemble_f, assemble_g, flat_pair_tensors, higgs_pair_tensors, is_harmonic, Grid,
    HarmonicInput, TensorGridEval,
};
use hodgechart::monodromy::{
    compose_polyauto, continue_along_path, jacobian_degree_growth, loop_monodromy,
    ode_to_foliation, PolyAuto,
};
use hodgechart::rank1::{is_isotrivial, rank1_harmonicity, PeriodScenario};
use hodgechart::simpson::{flat_to_higgs, higgs_to_flat};
use hodgechart::symcore::{ChartPoint, CoeffMat, Dims};

use crate::scenario::*;

pub struct RunOutcome {
    pub results: Value,
    pub verdict: bool,
    pub csv: Option<String>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub grid_n: Option<usize>,
    pub tol: Option<f64>,
}

/// Bake command-line overrides into the scenario so the echoed block
/// reproduces the run when fed back without flags.
pub fn apply_overrides(s: &mut Scenario, o: &Overrides) {
    fn regrid(g: &mut GridJson, n: usize) {
        for axis in &mut g.base {
            axis.n = n;
        }
    }
    match &mut s.body {
        ScenarioBody::Chern(x) => {
            if let Some(n) = o.grid_n {
                regrid(&mut x.grid, n);
            }
            if let Some(t) = o.tol {
                x.tol = t;
            }
        }
        ScenarioBody::CurvatureF(x) => {
            if let Some(n) = o.grid_n {
                regrid(&mut x.grid, n);
            }
            if let Some(t) = o.tol {
                x.tol = t;
            }
        }
        ScenarioBody::CurvatureG(x) => {
            if let Some(n) = o.grid_n {
                regrid(&mut x.grid, n);
            }
            if let Some(t) = o.tol {
                x.tol = t;
            }
        }
        ScenarioBody::HarmonicCheck(x) => {
            if let Some(n) = o.grid_n {
                regrid(&mut x.grid, n);
            }
            if let Some(t) = o.tol {
                x.tol = t;
            }
        }
        ScenarioBody::Rank1(x) => {
            if let Some(n) = o.grid_n {
                x.domain.n = n;
            }
            if let Some(t) = o.tol {
                x.tol = t;
            }
        }
        ScenarioBody::SimpsonForward(_)
        | ScenarioBody::SimpsonBackward(_)
        | ScenarioBody::Monodromy(_)
        | ScenarioBody::Autgroup(_) => {}
    }
}

pub fn run_scenario(s: &Scenario, want_csv: bool) -> Result<RunOutcome> {
    match &s.body {
        ScenarioBody::Chern(x) => run_chern(x),
        ScenarioBody::CurvatureF(x) => run_curvature_f(x, want_csv),
        ScenarioBody::CurvatureG(x) => run_curvature_g(x, want_csv),
        ScenarioBody::SimpsonForward(x) => run_simpson_forward(x),
        ScenarioBody::SimpsonBackward(x) => run_simpson_backward(x),
        ScenarioBody::HarmonicCheck(x) => run_harmonic_check(x, want_csv),
        ScenarioBody::Monodromy(x) => run_monodromy(x),
        ScenarioBody::Autgroup(x) => run_autgroup(x),
        ScenarioBody::Rank1(x) => run_rank1(x, want_csv),
    }
}

fn linear_metric(dims: Dims, h: &MatJson) -> Result<MetricChart> {
    let hm = to_mat(dims, h, dims.r, dims.r, "metric_h")?;
    Ok(metric_from_linear_hermitian(dims, &hm).context("metric_h")?)
}

fn canonical(dims: Dims) -> Result<DBarChart> {
    Ok(DBarChart::new(dims, CoeffMat::zeros(dims, dims.m, dims.r))?)
}

fn grid_points(dims: Dims, g: &GridJson) -> Result<(Grid, Vec<ChartPoint>)> {
    let grid = to_grid(g);
    let points = grid.points(dims).context("grid")?;
    Ok((grid, points))
}

fn run_chern(x: &ChernScenario) -> Result<RunOutcome> {
    let dims = x.dims.to_dims();
    let metric = linear_metric(dims, &x.metric_h)?;
    let conn = chern_connection(metric.clone(), canonical(dims)?)?;
    let (_, points) = grid_points(dims, &x.grid)?;
    let residual = orthogonality_residual(&conn, &metric, &points)?;
    let c = conn.symbolic_c()?;
    let closed = metric.is_closed()?;
    let verdict = residual < x.tol;
    Ok(RunOutcome {
        results: json!({
            "connection_c": mat_to_json(&c),
            "orthogonality_residual": residual,
            "form_closed": closed,
        }),
        verdict,
        csv: None,
    })
}

fn run_curvature_f(x: &CurvatureFScenario, want_csv: bool) -> Result<RunOutcome> {
    let dims = x.dims.to_dims();
    let theta = HiggsChart::new_holomorphic(dims, to_mat(dims, &x.theta, dims.m, dims.r, "theta")?)?;
    let metric = linear_metric(dims, &x.metric_h)?;
    let beta = to_beta(dims, &x.beta)?;
    let (_, points) = grid_points(dims, &x.grid)?;
    let (report, flat) = assemble_f(
        &theta,
        &metric,
        &beta,
        &RealFormSpec::LinearUnitary,
        &points,
        x.tol,
    )?;
    let csv = if want_csv {
        Some(evals_to_csv(
            dims,
            &flat_pair_tensors(&flat.dbar, &flat.nabla, &points)?,
        ))
    } else {
        None
    };
    Ok(RunOutcome {
        verdict: report.harmonic_at_tolerance,
        results: json!({
            "report": serde_json::to_value(&report)?,
            "flat_u": mat_to_json(flat.dbar.u()),
            "nabla_c": mat_to_json(&flat.nabla.symbolic_c()?),
        }),
        csv,
    })
}

fn connection_from(
    dims: Dims,
    c: &MatJson,
    cbar: Option<&MatJson>,
    field: &str,
) -> Result<ConnectionChart> {
    let cm = to_mat(dims, c, dims.m, dims.r, field)?;
    Ok(match cbar {
        None => ConnectionChart::explicit(dims, cm)?,
        Some(cb) => ConnectionChart::explicit_with_conjugate_part(
            dims,
            cm,
            to_mat(dims, cb, dims.m, dims.r, &format!("{field}bar"))?,
        )?,
    })
}

fn run_curvature_g(x: &CurvatureGScenario, want_csv: bool) -> Result<RunOutcome> {
    let dims = x.dims.to_dims();
    let nabla = connection_from(dims, &x.nabla_c, x.nabla_cbar.as_ref(), "nabla_c")?;
    let dbar = DBarChart::new(dims, to_mat(dims, &x.dbar_u, dims.m, dims.r, "dbar_u")?)?;
    let metric = linear_metric(dims, &x.metric_h)?;
    let beta = to_beta(dims, &x.beta)?;
    let (_, points) = grid_points(dims, &x.grid)?;
    let (report, higgs) = assemble_g(
        &nabla,
        &dbar,
        &metric,
        &beta,
        &RealFormSpec::LinearUnitary,
        &points,
        x.tol,
    )?;
    let csv = if want_csv {
        Some(evals_to_csv(
            dims,
            &higgs_pair_tensors(&higgs.dbar, &higgs.theta, &beta, &points)?,
        ))
    } else {
        None
    };
    Ok(RunOutcome {
        verdict: report.harmonic_at_tolerance,
        results: json!({
            "report": serde_json::to_value(&report)?,
            "theta": mat_to_json(higgs.theta.theta()),
            "higgs_u": mat_to_json(higgs.dbar.u()),
        }),
        csv,
    })
}

fn run_simpson_forward(x: &SimpsonForwardScenario) -> Result<RunOutcome> {
    let dims = x.dims.to_dims();
    let theta = HiggsChart::new_holomorphic(dims, to_mat(dims, &x.theta, dims.m, dims.r, "theta")?)?;
    let dbar = match &x.dbar_u {
        None => canonical(dims)?,
        Some(u) => DBarChart::new(dims, to_mat(dims, u, dims.m, dims.r, "dbar_u")?)?,
    };
    let metric = linear_metric(dims, &x.metric_h)?;
    let beta = to_beta(dims, &x.beta)?;
    let flat = higgs_to_flat(&theta, &dbar, &metric, &beta, &RealFormSpec::LinearUnitary)?;
    Ok(RunOutcome {
        verdict: true,
        results: json!({
            "flat_u": mat_to_json(flat.dbar.u()),
            "chern_c": mat_to_json(&flat.chern.symbolic_c()?),
            "nabla_c": mat_to_json(&flat.nabla.symbolic_c()?),
            "nabla_cbar": flat.nabla.symbolic_cbar().map(|m| mat_to_json(&m)),
        }),
        csv: None,
    })
}

fn run_simpson_backward(x: &SimpsonBackwardScenario) -> Result<RunOutcome> {
    let dims = x.dims.to_dims();
    let nabla = connection_from(dims, &x.nabla_c, x.nabla_cbar.as_ref(), "nabla_c")?;
    let dbar = DBarChart::new(dims, to_mat(dims, &x.dbar_u, dims.m, dims.r, "dbar_u")?)?;
    let metric = linear_metric(dims, &x.metric_h)?;
    let beta = to_beta(dims, &x.beta)?;
    let higgs = flat_to_higgs(&nabla, &dbar, &metric, &beta, &RealFormSpec::LinearUnitary)?;
    Ok(RunOutcome {
        verdict: true,
        results: json!({
            "theta": mat_to_json(higgs.theta.theta()),
            "higgs_u": mat_to_json(higgs.dbar.u()),
            "theta_holomorphic": higgs.theta.is_holomorphic(),
        }),
        csv: None,
    })
}

fn run_harmonic_check(x: &HarmonicCheckScenario, want_csv: bool) -> Result<RunOutcome> {
    let dims = x.dims.to_dims();
    let metric = linear_metric(dims, &x.metric_h)?;
    let beta = to_beta(dims, &x.beta)?;
    let (grid, points) = grid_points(dims, &x.grid)?;
    let input = match x.side {
        Side::Higgs => {
            let theta_json = x
                .theta
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("`theta` is required when side = higgs"))?;
            let theta =
                HiggsChart::new_holomorphic(dims, to_mat(dims, theta_json, dims.m, dims.r, "theta")?)?;
            HarmonicInput::HiggsSide {
                theta,
                metric: metric.clone(),
                beta: beta.clone(),
                realform: RealFormSpec::LinearUnitary,
            }
        }
        Side::Flat => {
            let c_json = x
                .nabla_c
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("`nabla_c` is required when side = flat"))?;
            let u_json = x
                .dbar_u
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("`dbar_u` is required when side = flat"))?;
            let nabla = connection_from(dims, c_json, x.nabla_cbar.as_ref(), "nabla_c")?;
            let dbar = DBarChart::new(dims, to_mat(dims, u_json, dims.m, dims.r, "dbar_u")?)?;
            HarmonicInput::FlatSide {
                nabla,
                dbar,
                metric: metric.clone(),
                beta: beta.clone(),
                realform: RealFormSpec::LinearUnitary,
            }
        }
    };
    let report = is_harmonic(&input, &grid, x.tol)?;
    let csv = if want_csv {
        let evals = match &input {
            HarmonicInput::HiggsSide { theta, .. } => {
                let flat = higgs_to_flat(
                    theta,
                    &canonical(dims)?,
                    &metric,
                    &beta,
                    &RealFormSpec::LinearUnitary,
                )?;
                flat_pair_tensors(&flat.dbar, &flat.nabla, &points)?
            }
            HarmonicInput::FlatSide { nabla, dbar, .. } => {
                let higgs =
                    flat_to_higgs(nabla, dbar, &metric, &beta, &RealFormSpec::LinearUnitary)?;
                higgs_pair_tensors(&higgs.dbar, &higgs.theta, &beta, &points)?
            }
        };
        Some(evals_to_csv(dims, &evals))
    } else {
        None
    };
    Ok(RunOutcome {
        verdict: report.harmonic,
        results: json!({ "report": serde_json::to_value(&report)? }),
        csv,
    })
}

fn run_monodromy(x: &MonodromyScenario) -> Result<RunOutcome> {
    let ode = to_ode(&x.ode)?;
    let fol = ode_to_foliation(&ode)?;
    let path = to_path(&x.path);
    let samples: Vec<Vec<num_complex::Complex64>> = x
        .samples
        .iter()
        .map(|s| s.iter().map(|z| complex(*z)).collect())
        .collect();
    for (i, s) in samples.iter().enumerate() {
        if s.len() != ode.order() {
            bail!(
                "`samples[{i}]` has {} components; the order-{} system needs {}",
                s.len(),
                ode.order(),
                ode.order()
            );
        }
    }

    let mut rows = Vec::with_capacity(samples.len());
    let mut verdict = true;
    let mut matrix = None;
    let mut fit_residual = None;
    if x.closed {
        let res = loop_monodromy(&fol, &path, &samples)?;
        for (t0, out) in &res.samples {
            match out {
                Ok(v) => rows.push(json!({
                    "input": t0.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
                    "output": v.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
                })),
                Err(e) => {
                    verdict = false;
                    rows.push(json!({
                        "input": t0.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
                        "error": e.to_string(),
                    }));
                }
            }
        }
        if let Some((m, resid)) = res.matrix {
            matrix = Some(
                (0..m.nrows())
                    .map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            );
            fit_residual = Some(resid);
        }
    } else {
        for t0 in &samples {
            match continue_along_path(&fol, &path, t0) {
                Ok(v) => rows.push(json!({
                    "input": t0.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
                    "output": v.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
                })),
                Err(e) => {
                    verdict = false;
                    rows.push(json!({
                        "input": t0.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
                        "error": e.to_string(),
                    }));
                }
            }
        }
    }
    Ok(RunOutcome {
        verdict,
        results: json!({
            "samples": rows,
            "matrix": matrix,
            "fit_residual": fit_residual,
        }),
        csv: None,
    })
}

fn run_autgroup(x: &AutgroupScenario) -> Result<RunOutcome> {
    let generators = to_generators(x)?;
    let table = jacobian_degree_growth(&generators, x.max_len, x.cap)?;
    let composite_degrees = match &x.composite {
        None => None,
        Some(comp) => {
            let lookup = |name: &str| -> Result<&PolyAuto> {
                generators
                    .iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, a)| a)
                    .ok_or_else(|| anyhow::anyhow!("composite word names unknown generator `{name}`"))
            };
            let mut word = PolyAuto::identity(x.n);
            for name in &comp.word {
                word = compose_polyauto(&word, lookup(name)?)?;
            }
            let mut degrees = Vec::with_capacity(comp.powers);
            let mut power = word.clone();
            for _ in 0..comp.powers {
                degrees.push(power.degree());
                power = compose_polyauto(&power, &word)?;
            }
            Some(degrees)
        }
    };
    Ok(RunOutcome {
        verdict: true,
        results: json!({
            "table": serde_json::to_value(&table)?,
            "composite_degrees": composite_degrees,
        }),
        csv: None,
    })
}

fn run_rank1(x: &Rank1Scenario, want_csv: bool) -> Result<RunOutcome> {
    let dims = Dims::new(1, 2);
    let tau = to_poly(dims, &x.tau, "tau")?;
    let scenario = PeriodScenario::new(
        tau,
        hodgechart::curvature::AxisGrid {
            center: complex(x.domain.center),
            halfwidth: x.domain.halfwidth,
            n: x.domain.n,
        },
    )?;
    let grid = Grid {
        base: vec![scenario.domain.clone()],
        fiber: (0..dims.r)
            .map(|_| hodgechart::curvature::RingGrid {
                center: num_complex::Complex64::new(0.0, 0.0),
                radius: x.fiber_radius,
                n: x.fiber_n,
            })
            .collect(),
    };
    let report = rank1_harmonicity(&scenario, &grid, x.tol)?;
    let csv = if want_csv {
        let sys = hodgechart::rank1::ks_system(&scenario)?;
        let points = grid.points(dims)?;
        let flat = higgs_to_flat(
            &sys.theta,
            &canonical(dims)?,
            &sys.metric,
            &hodgechart::simpson::BetaMap::identity(dims),
            &RealFormSpec::LinearUnitary,
        )?;
        Some(evals_to_csv(
            dims,
            &flat_pair_tensors(&flat.dbar, &flat.nabla, &points)?,
        ))
    } else {
        None
    };
    Ok(RunOutcome {
        verdict: report.harmonic_at_tolerance,
        results: json!({
            "report": serde_json::to_value(&report)?,
            "isotrivial": is_isotrivial(&scenario),
        }),
        csv,
    })
}

/// One row per grid point per tensor component.
fn evals_to_csv(dims: Dims, evals: &[TensorGridEval]) -> String {
    let mut out = String::new();
    out.push_str("tensor,i,j,component");
    for k in 0..dims.m {
        out.push_str(&format!(",s{k}_re,s{k}_im"));
    }
    for k in 0..dims.r {
        out.push_str(&format!(",t{k}_re,t{k}_im"));
    }
    out.push_str(",value_re,value_im\n");
    for eval in evals {
        for (point_idx, point) in eval.points.iter().enumerate() {
            for (pi, (i, j)) in eval.pairs.iter().enumerate() {
                for (l, v) in eval.values[point_idx][pi].iter().enumerate() {
                    out.push_str(&format!("{},{},{},{}", eval.label, i, j, l));
                    for z in &point.s {
                        out.push_str(&format!(",{},{}", z.re, z.im));
                    }
                    for z in &point.t {
                        out.push_str(&format!(",{},{}", z.re, z.im));
                    }
                    out.push_str(&format!(",{},{}\n", v.re, v.im));
                }
            }
        }
    }
    out
}
