//! Chart-level computation engine for nonlinear harmonic bundles.
//!
//! Everything here happens on a single product chart `U × V` of a fiber
//! bundle, with base coordinates `s_1..s_m` and fiber coordinates
//! `t_1..t_r`. Coefficients are polynomials in the holomorphic and
//! antiholomorphic coordinates jointly (Wirtinger calculus), optionally
//! divided by a polynomial and multiplied by an exponential factor.
//!
//! The layers build on each other:
//!
//! * [`symcore`] - polynomials, coefficient functions, vector fields,
//!   Lie brackets, and the small amount of dense linear algebra needed
//!   at evaluation points.
//! * [`bundles`] - charts for del-bar operators, almost connections,
//!   and Higgs fields, with the integrability predicates.
//! * [`chern`] - hermitian metrics as (1,1)-forms and the metric (Chern)
//!   connection they induce on a del-bar chart.
//! * [`conjugation`] - the anti-involution sending a Higgs field to its
//!   metric adjoint with a sign.
//! * [`simpson`] - the two transforms exchanging Higgs data and flat
//!   data through a metric and a comparison map beta.
//! * [`curvature`] - the typed curvature tensors of both transforms and
//!   the harmonicity verdict.
//! * [`monodromy`] - rational ODE foliations, parallel transport along
//!   base paths, and degree growth in polynomial automorphism groups.
//! * [`rank1`] - weight-one variation scenarios: Kodaira-Spencer Higgs
//!   field, Hodge metric, and the harmonicity of the induced pair.

pub mod bundles;
pub mod chern;
pub mod conjugation;
pub mod curvature;
pub mod error;
pub mod monodromy;
pub mod rank1;
pub mod simpson;
pub mod symcore;

mod booktests;

pub use error::ChartError;
