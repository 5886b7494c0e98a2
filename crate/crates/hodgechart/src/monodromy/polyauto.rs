//! Polynomial automorphisms of the fiber and Jacobian degree growth.
//!
//! Representations into the group of polynomial automorphisms of
//! complex affine space are the natural monodromy targets for
//! nonlinear flat connections. Whether an image group sits inside a
//! finite-dimensional Lie subgroup shows up at desk scale as degree
//! growth: composing generators either stays in a fixed-degree normal
//! form or the Jacobian entries grow without bound.

use crate::error::ChartError;
use crate::symcore::{Dims, Var, WirtingerPoly};

/// A polynomial self-map of the fiber `(t_1, ..., t_n)`, one
/// polynomial per component. Composition-closed; inverses are not
/// represented.
#[derive(Debug, Clone)]
pub struct PolyAuto {
    dims: Dims,
    comps: Vec<WirtingerPoly>,
}

impl PolyAuto {
    pub fn new(n: usize, comps: Vec<WirtingerPoly>) -> Result<PolyAuto, ChartError> {
        if n == 0 {
            return Err(ChartError::invalid("automorphisms need at least one variable"));
        }
        let dims = Dims::new(0, n);
        if comps.len() != n {
            return Err(ChartError::invalid(format!(
                "expected {} components, got {}",
                n,
                comps.len()
            )));
        }
        for p in &comps {
            p.dims().check_eq(dims, "automorphism component")?;
            if !p.is_holomorphic() {
                return Err(ChartError::invalid(
                    "automorphism components must be holomorphic polynomials",
                ));
            }
            if p.total_degree() == 0 {
                return Err(ChartError::invalid(
                    "automorphism components must have degree at least one",
                ));
            }
        }
        Ok(PolyAuto { dims, comps })
    }

    pub fn identity(n: usize) -> PolyAuto {
        let dims = Dims::new(0, n);
        PolyAuto {
            dims,
            comps: (0..n).map(|k| WirtingerPoly::variable(dims, Var::T(k))).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.dims.r
    }

    pub fn comps(&self) -> &[WirtingerPoly] {
        &self.comps
    }

    /// Maximal total degree among the components.
    pub fn degree(&self) -> u32 {
        self.comps.iter().map(WirtingerPoly::total_degree).max().unwrap_or(0)
    }

    /// Maximal total degree among the Jacobian entries
    /// `d comp_l / d t_k`.
    pub fn jacobian_degree(&self) -> u32 {
        let mut deg = 0;
        for comp in &self.comps {
            for k in 0..self.dims.r {
                deg = deg.max(comp.wirtinger_derive(Var::T(k)).total_degree());
            }
        }
        deg
    }

    pub fn is_identity(&self) -> bool {
        self.comps
            .iter()
            .enumerate()
            .all(|(k, p)| p.sub(&WirtingerPoly::variable(self.dims, Var::T(k))).is_zero())
    }
}

/// Exact polynomial composition `f(g(t))`.
pub fn compose_polyauto(f: &PolyAuto, g: &PolyAuto) -> Result<PolyAuto, ChartError> {
    f.dims.check_eq(g.dims, "automorphism composition")?;
    Ok(PolyAuto {
        dims: f.dims,
        comps: f.comps.iter().map(|p| p.substitute_fiber(&g.comps)).collect(),
    })
}

/// One row of the degree-growth table.
#[derive(Debug, Clone, serde::Serialize)]
pub struct WordDegree {
    pub word: String,
    pub length: usize,
    pub component_degree: u32,
    pub jacobian_degree: u32,
}

/// Compose every positive word in the generators up to `max_len` and
/// report degrees. `cap` bounds the number of words enumerated; a
/// monotone-growing maximum certifies unbounded degree at desk scale,
/// a bounded table is evidence of closure in a fixed normal form.
pub fn jacobian_degree_growth(
    generators: &[(String, PolyAuto)],
    max_len: usize,
    cap: usize,
) -> Result<Vec<WordDegree>, ChartError> {
    if max_len == 0 {
        return Err(ChartError::invalid("word length bound must be at least one"));
    }
    if generators.is_empty() {
        return Err(ChartError::invalid("no generators supplied"));
    }
    let g = generators.len();
    let mut total = 0usize;
    let mut layer_size = 1usize;
    for _ in 0..max_len {
        layer_size = layer_size.saturating_mul(g);
        total = total.saturating_add(layer_size);
        if total > cap {
            return Err(ChartError::WordBudgetExceeded { cap });
        }
    }

    let mut out = Vec::with_capacity(total);
    // layer k holds (word, composition) for all words of length k
    let mut layer: Vec<(String, PolyAuto)> = generators.to_vec();
    for _ in 0..max_len {
        for (word, auto) in &layer {
            out.push(WordDegree {
                word: word.clone(),
                length: word.split('.').count(),
                component_degree: auto.degree(),
                jacobian_degree: auto.jacobian_degree(),
            });
        }
        let mut next = Vec::with_capacity(layer.len() * g);
        if out.len() < total {
            for (word, auto) in &layer {
                for (gname, gen) in generators {
                    next.push((
                        format!("{word}.{gname}"),
                        compose_polyauto(gen, auto)?,
                    ));
                }
            }
        }
        layer = next;
    }
    Ok(out)
}
