//! Scenario schema (version 1) and conversion into engine types.
//!
//! Scenarios are JSON. Complex numbers are `[re, im]` pairs,
//! polynomials are term lists `{"c": [re, im], "e": [exponents]}` with
//! exponent vectors in the fixed flat variable order
//! `(s_1..s_m, sbar_1..sbar_m, t_1..t_r, tbar_1..tbar_r)`, and
//! coefficient functions are `{"num": poly, "den"?: poly,
//! "expo"?: poly}` meaning `(num / den) * exp(expo)`.

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use hodgechart::curvature::{AxisGrid, Grid, RingGrid};
use hodgechart::monodromy::{BasePath, PathSegment, PolyAuto, RationalODE};
use hodgechart::simpson::BetaMap;
use hodgechart::symcore::{CoeffFn, CoeffMat, Dims, Var, WirtingerPoly};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(flatten)]
    pub body: ScenarioBody,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScenarioBody {
    Chern(ChernScenario),
    CurvatureF(CurvatureFScenario),
    CurvatureG(CurvatureGScenario),
    SimpsonForward(SimpsonForwardScenario),
    SimpsonBackward(SimpsonBackwardScenario),
    HarmonicCheck(HarmonicCheckScenario),
    Monodromy(MonodromyScenario),
    Autgroup(AutgroupScenario),
    Rank1(Rank1Scenario),
}

impl ScenarioBody {
    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioBody::Chern(_) => "chern",
            ScenarioBody::CurvatureF(_) => "curvature-f",
            ScenarioBody::CurvatureG(_) => "curvature-g",
            ScenarioBody::SimpsonForward(_) => "simpson-forward",
            ScenarioBody::SimpsonBackward(_) => "simpson-backward",
            ScenarioBody::HarmonicCheck(_) => "harmonic-check",
            ScenarioBody::Monodromy(_) => "monodromy",
            ScenarioBody::Autgroup(_) => "autgroup",
            ScenarioBody::Rank1(_) => "rank1",
        }
    }
}

/// Parse with field-path diagnostics on schema violations. The kind is
/// dispatched by hand so path tracking sees plain structs only.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let value: serde_json::Value = serde_json::from_str(text).context("scenario is not JSON")?;
    let version = match value.get("schema_version") {
        None => bail!("missing `schema_version`"),
        Some(v) => v
            .as_u64()
            .ok_or_else(|| anyhow!("`schema_version` must be an integer"))?,
    };
    if version != SCHEMA_VERSION as u64 {
        bail!("unsupported schema_version {version} (this build reads {SCHEMA_VERSION})");
    }
    let kind = value
        .get("kind")
        .and_then(|v| v.as_str())
        .ok_or_else(|| anyhow!("missing `kind`"))?
        .to_owned();

    fn body<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T> {
        serde_path_to_error::deserialize(value)
            .map_err(|e| anyhow!("schema violation at `{}`: {}", e.path(), e.inner()))
    }
    let parsed = match kind.as_str() {
        "chern" => ScenarioBody::Chern(body(value)?),
        "curvature-f" => ScenarioBody::CurvatureF(body(value)?),
        "curvature-g" => ScenarioBody::CurvatureG(body(value)?),
        "simpson-forward" => ScenarioBody::SimpsonForward(body(value)?),
        "simpson-backward" => ScenarioBody::SimpsonBackward(body(value)?),
        "harmonic-check" => ScenarioBody::HarmonicCheck(body(value)?),
        "monodromy" => ScenarioBody::Monodromy(body(value)?),
        "autgroup" => ScenarioBody::Autgroup(body(value)?),
        "rank1" => ScenarioBody::Rank1(body(value)?),
        other => bail!("unknown scenario kind `{other}`"),
    };
    Ok(Scenario {
        schema_version: version as u32,
        body: parsed,
    })
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
pub struct DimsJson {
    pub m: usize,
    pub r: usize,
}

impl DimsJson {
    pub fn to_dims(self) -> Dims {
        Dims::new(self.m, self.r)
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct TermJson {
    pub c: [f64; 2],
    pub e: Vec<u16>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct PolyJson {
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct CoeffJson {
    pub num: PolyJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub den: Option<PolyJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expo: Option<PolyJson>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct MatJson {
    pub entries: Vec<Vec<CoeffJson>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct AxisJson {
    pub center: [f64; 2],
    pub halfwidth: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct RingJson {
    pub center: [f64; 2],
    pub radius: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct GridJson {
    pub base: Vec<AxisJson>,
    pub fiber: Vec<RingJson>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BetaJson {
    Identity,
    VerticalLinear { q: MatJson },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct ChernScenario {
    pub dims: DimsJson,
    pub metric_h: MatJson,
    pub grid: GridJson,
    pub tol: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct CurvatureFScenario {
    pub dims: DimsJson,
    pub theta: MatJson,
    pub metric_h: MatJson,
    pub beta: BetaJson,
    pub grid: GridJson,
    pub tol: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct CurvatureGScenario {
    pub dims: DimsJson,
    pub nabla_c: MatJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nabla_cbar: Option<MatJson>,
    pub dbar_u: MatJson,
    pub metric_h: MatJson,
    pub beta: BetaJson,
    pub grid: GridJson,
    pub tol: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct SimpsonForwardScenario {
    pub dims: DimsJson,
    pub theta: MatJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dbar_u: Option<MatJson>,
    pub metric_h: MatJson,
    pub beta: BetaJson,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct SimpsonBackwardScenario {
    pub dims: DimsJson,
    pub nabla_c: MatJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nabla_cbar: Option<MatJson>,
    pub dbar_u: MatJson,
    pub metric_h: MatJson,
    pub beta: BetaJson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Higgs,
    Flat,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct HarmonicCheckScenario {
    pub dims: DimsJson,
    pub side: Side,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<MatJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nabla_c: Option<MatJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nabla_cbar: Option<MatJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dbar_u: Option<MatJson>,
    pub metric_h: MatJson,
    pub beta: BetaJson,
    pub grid: GridJson,
    pub tol: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct OdeJson {
    pub n: usize,
    pub num: PolyJson,
    pub den: PolyJson,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SegmentJson {
    Line {
        from: [f64; 2],
        to: [f64; 2],
    },
    Arc {
        center: [f64; 2],
        radius: f64,
        start_angle: f64,
        turns: f64,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct PathJson {
    pub segments: Vec<SegmentJson>,
    #[serde(default)]
    pub punctures: Vec<[f64; 2]>,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_margin() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct MonodromyScenario {
    pub ode: OdeJson,
    pub path: PathJson,
    pub samples: Vec<Vec<[f64; 2]>>,
    /// Closed loops run monodromy; open paths run plain continuation.
    #[serde(default = "default_true")]
    pub closed: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct GeneratorJson {
    pub name: String,
    pub comps: Vec<PolyJson>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct CompositeJson {
    /// Function-composition order: `["q", "s"]` is `q` after `s`.
    pub word: Vec<String>,
    pub powers: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct AutgroupScenario {
    pub n: usize,
    pub generators: Vec<GeneratorJson>,
    pub max_len: usize,
    #[serde(default = "default_cap")]
    pub cap: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub composite: Option<CompositeJson>,
}

fn default_cap() -> usize {
    10_000
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct Rank1Scenario {
    pub tau: PolyJson,
    pub domain: AxisJson,
    #[serde(default = "default_fiber_radius")]
    pub fiber_radius: f64,
    #[serde(default = "default_fiber_n")]
    pub fiber_n: usize,
    pub tol: f64,
}

fn default_fiber_radius() -> f64 {
    1.0
}

fn default_fiber_n() -> usize {
    3
}

pub fn complex(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn to_poly(dims: Dims, p: &PolyJson, field: &str) -> Result<WirtingerPoly> {
    let nvars = 2 * (dims.m + dims.r);
    let mut acc = WirtingerPoly::constant(dims, Complex64::new(0.0, 0.0));
    for (ti, term) in p.terms.iter().enumerate() {
        if term.e.len() != nvars {
            bail!(
                "`{field}.terms[{ti}].e` has {} exponents; chart with m={}, r={} needs {}",
                term.e.len(),
                dims.m,
                dims.r,
                nvars
            );
        }
        let mut mono = WirtingerPoly::constant(dims, complex(term.c));
        for (flat, &exp) in term.e.iter().enumerate() {
            if exp > 0 {
                let v = WirtingerPoly::variable(dims, Var::from_flat(flat, dims));
                mono = mono.mul(&v.pow(exp as u32));
            }
        }
        acc = acc.add(&mono);
    }
    Ok(acc)
}

pub fn to_coeff(dims: Dims, c: &CoeffJson, field: &str) -> Result<CoeffFn> {
    let num = to_poly(dims, &c.num, &format!("{field}.num"))?;
    let den = c
        .den
        .as_ref()
        .map(|d| to_poly(dims, d, &format!("{field}.den")))
        .transpose()?;
    let expo = c
        .expo
        .as_ref()
        .map(|e| to_poly(dims, e, &format!("{field}.expo")))
        .transpose()?;
    let out = match (den, expo) {
        (None, None) => CoeffFn::from(num),
        (Some(d), None) => CoeffFn::rational(num, d),
        (None, Some(e)) => CoeffFn::exponential(num, e),
        (Some(d), Some(e)) => CoeffFn::from_parts(num, d, e),
    };
    Ok(out)
}

pub fn to_mat(
    dims: Dims,
    m: &MatJson,
    rows: usize,
    cols: usize,
    field: &str,
) -> Result<CoeffMat> {
    if m.entries.len() != rows {
        bail!("`{field}.entries` has {} rows; expected {rows}", m.entries.len());
    }
    let mut out = CoeffMat::zeros(dims, rows, cols);
    for (i, row) in m.entries.iter().enumerate() {
        if row.len() != cols {
            bail!(
                "`{field}.entries[{i}]` has {} columns; expected {cols}",
                row.len()
            );
        }
        for (j, entry) in row.iter().enumerate() {
            out.set(i, j, to_coeff(dims, entry, &format!("{field}.entries[{i}][{j}]"))?);
        }
    }
    Ok(out)
}

pub fn to_grid(g: &GridJson) -> Grid {
    Grid {
        base: g
            .base
            .iter()
            .map(|a| AxisGrid {
                center: complex(a.center),
                halfwidth: a.halfwidth,
                n: a.n,
            })
            .collect(),
        fiber: g
            .fiber
            .iter()
            .map(|r| RingGrid {
                center: complex(r.center),
                radius: r.radius,
                n: r.n,
            })
            .collect(),
    }
}

pub fn to_beta(dims: Dims, b: &BetaJson) -> Result<BetaMap> {
    match b {
        BetaJson::Identity => Ok(BetaMap::identity(dims)),
        BetaJson::VerticalLinear { q } => {
            let qm = to_mat(dims, q, dims.r, dims.r, "beta.q")?;
            Ok(BetaMap::vertical_linear(dims, qm).context("beta.q")?)
        }
    }
}

pub fn to_ode(o: &OdeJson) -> Result<RationalODE> {
    let dims = Dims::new(1, o.n);
    let num = to_poly(dims, &o.num, "ode.num")?;
    let den = to_poly(dims, &o.den, "ode.den")?;
    Ok(RationalODE::new(o.n, num, den).context("ode")?)
}

pub fn to_path(p: &PathJson) -> BasePath {
    let segments = p
        .segments
        .iter()
        .map(|s| match s {
            SegmentJson::Line { from, to } => PathSegment::Line {
                from: complex(*from),
                to: complex(*to),
            },
            SegmentJson::Arc {
                center,
                radius,
                start_angle,
                turns,
            } => PathSegment::Arc {
                center: complex(*center),
                radius: *radius,
                start_angle: *start_angle,
                end_angle: start_angle + turns * 2.0 * std::f64::consts::PI,
            },
        })
        .collect();
    BasePath {
        segments,
        punctures: p.punctures.iter().map(|z| complex(*z)).collect(),
        margin: p.margin,
    }
}

pub fn to_generators(s: &AutgroupScenario) -> Result<Vec<(String, PolyAuto)>> {
    let dims = Dims::new(0, s.n);
    s.generators
        .iter()
        .enumerate()
        .map(|(gi, g)| {
            let comps = g
                .comps
                .iter()
                .enumerate()
                .map(|(ci, p)| to_poly(dims, p, &format!("generators[{gi}].comps[{ci}]")))
                .collect::<Result<Vec<_>>>()?;
            let auto = PolyAuto::new(s.n, comps).context(format!("generators[{gi}]"))?;
            Ok((g.name.clone(), auto))
        })
        .collect()
}

/// Serialize a polynomial back to the term-list form, in the canonical
/// monomial order.
pub fn poly_to_json(p: &WirtingerPoly) -> PolyJson {
    PolyJson {
        terms: p
            .terms()
            .map(|(mono, c)| TermJson {
                c: pair(*c),
                e: mono.0.to_vec(),
            })
            .collect(),
    }
}

pub fn coeff_to_json(c: &CoeffFn) -> CoeffJson {
    let den = if c.den().sub(&WirtingerPoly::one(c.dims())).is_zero() {
        None
    } else {
        Some(poly_to_json(c.den()))
    };
    let expo = if c.expo().is_zero() {
        None
    } else {
        Some(poly_to_json(c.expo()))
    };
    CoeffJson {
        num: poly_to_json(c.num()),
        den,
        expo,
    }
}

pub fn mat_to_json(m: &CoeffMat) -> MatJson {
    let (rows, cols) = (m.nrows(), m.ncols());
    MatJson {
        entries: (0..rows)
            .map(|i| (0..cols).map(|j| coeff_to_json(m.get(i, j))).collect())
            .collect(),
    }
}
