//! Symbolic core: Wirtinger polynomials, coefficient functions, vector
//! fields, and pointwise linear algebra.
//!
//! All charts share one variable convention. For base dimension `m` and
//! fiber dimension `r` the flat variable order is
//!
//! ```text
//! s_1 .. s_m, sb_1 .. sb_m, t_1 .. t_r, tb_1 .. tb_r
//! ```
//!
//! where `sb`/`tb` denote the conjugate coordinates. Polynomials treat
//! the conjugates as independent variables (Wirtinger calculus);
//! evaluation only ever happens at honest points, where the barred
//! values are the complex conjugates of the unbarred ones.

mod coeff;
mod dims;
mod field;
mod linalg;
mod matrix;
mod poly;
mod sample;

pub use coeff::CoeffFn;
pub use dims::{ChartPoint, Dims, Var};
pub use field::{lie_bracket, VectorFieldChart};
pub use linalg::{hermitian_solve, least_squares, numeric_rank, sup_norm, CMat, CVec, HermitianFactor};
pub use matrix::{CoeffMat, MatJet};
pub use poly::{Monomial, WirtingerPoly};
pub use sample::PointSampler;
