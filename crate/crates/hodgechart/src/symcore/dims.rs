//! Chart dimensions, variable indexing, and evaluation points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ChartError;

/// Base and fiber dimensions of a product chart.
///
/// `m` counts the base coordinates `s_i`, `r` the fiber coordinates
/// `t_k`. Together with their conjugates this gives `2 (m + r)` real
/// polynomial variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub m: usize,
    pub r: usize,
}

impl Dims {
    pub fn new(m: usize, r: usize) -> Self {
        Dims { m, r }
    }

    /// Total number of polynomial variables on this chart.
    pub fn nvars(self) -> usize {
        2 * (self.m + self.r)
    }

    pub fn check_eq(self, other: Dims, context: &'static str) -> Result<(), ChartError> {
        if self == other {
            Ok(())
        } else {
            Err(ChartError::DimensionMismatch {
                expected: self,
                got: other,
                context,
            })
        }
    }
}

/// A coordinate variable on a chart. Indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    S(usize),
    SBar(usize),
    T(usize),
    TBar(usize),
}

impl Var {
    /// Position in the flat variable order `s, sb, t, tb`.
    pub fn flat(self, dims: Dims) -> usize {
        match self {
            Var::S(i) => {
                debug_assert!(i < dims.m);
                i
            }
            Var::SBar(i) => {
                debug_assert!(i < dims.m);
                dims.m + i
            }
            Var::T(k) => {
                debug_assert!(k < dims.r);
                2 * dims.m + k
            }
            Var::TBar(k) => {
                debug_assert!(k < dims.r);
                2 * dims.m + dims.r + k
            }
        }
    }

    pub fn from_flat(idx: usize, dims: Dims) -> Var {
        let m = dims.m;
        let r = dims.r;
        if idx < m {
            Var::S(idx)
        } else if idx < 2 * m {
            Var::SBar(idx - m)
        } else if idx < 2 * m + r {
            Var::T(idx - 2 * m)
        } else {
            debug_assert!(idx < 2 * (m + r));
            Var::TBar(idx - 2 * m - r)
        }
    }

    /// The conjugate variable.
    pub fn conj(self) -> Var {
        match self {
            Var::S(i) => Var::SBar(i),
            Var::SBar(i) => Var::S(i),
            Var::T(k) => Var::TBar(k),
            Var::TBar(k) => Var::T(k),
        }
    }

    pub fn is_barred(self) -> bool {
        matches!(self, Var::SBar(_) | Var::TBar(_))
    }

    /// All variables of the chart in flat order.
    pub fn all(dims: Dims) -> impl Iterator<Item = Var> {
        (0..dims.nvars()).map(move |idx| Var::from_flat(idx, dims))
    }
}

impl std::fmt::Display for Var {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Var::S(i) => write!(f, "s{}", i + 1),
            Var::SBar(i) => write!(f, "sb{}", i + 1),
            Var::T(k) => write!(f, "t{}", k + 1),
            Var::TBar(k) => write!(f, "tb{}", k + 1),
        }
    }
}

/// An honest evaluation point: barred coordinates are implied by
/// conjugation and never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub dims: Dims,
    pub s: Vec<Complex64>,
    pub t: Vec<Complex64>,
}

impl ChartPoint {
    pub fn new(dims: Dims, s: Vec<Complex64>, t: Vec<Complex64>) -> Self {
        assert_eq!(s.len(), dims.m, "base coordinate count");
        assert_eq!(t.len(), dims.r, "fiber coordinate count");
        ChartPoint { dims, s, t }
    }

    /// Value of a single variable at this point.
    pub fn value(&self, var: Var) -> Complex64 {
        match var {
            Var::S(i) => self.s[i],
            Var::SBar(i) => self.s[i].conj(),
            Var::T(k) => self.t[k],
            Var::TBar(k) => self.t[k].conj(),
        }
    }

    /// All variable values in flat order.
    pub fn flat_values(&self) -> Vec<Complex64> {
        Var::all(self.dims).map(|v| self.value(v)).collect()
    }
}
