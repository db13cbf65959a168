//! The embedding of polytopes into directed sets, and the two directed
//! subdifferentials built from it: the difference-of-convex route and the
//! quasidifferential route.

use std::sync::Arc;

use rayon::prelude::*;

use crate::directed_set::{DirectedSet, Entry};
use crate::error::{Error, Result};
use crate::expr::{convex_polyhedral_subdifferential, Expr};
use crate::geometry::{Polytope, SphereGrid, FACE_TOL};

/// `J_n(C)` sampled on `grid`.
///
/// In one dimension this is the directed interval `[min C, max C]`. Above
/// that, each direction `l` stores `δ*(l, C)` and the embedding of the
/// supporting face `Y(l, C)` after projecting it along `l`.
pub fn embed(c: &Polytope, grid: &Arc<SphereGrid>) -> Result<DirectedSet> {
    if c.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: c.dim() });
    }
    Ok(embed_unchecked(c, grid))
}

fn embed_unchecked(c: &Polytope, grid: &Arc<SphereGrid>) -> DirectedSet {
    let Some(sub) = grid.sub_grid() else {
        return DirectedSet::interval(c.support(&[-1.0]), c.support(&[1.0]));
    };
    let entries = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let l = grid.direction(i);
            let rot = grid.rotation(i);
            let face = c.face(l, FACE_TOL);
            let projected: Vec<Vec<f64>> = face.vertices().iter().map(|v| rot.project(v)).collect();
            let projected = Polytope::from_parts(grid.dim() - 1, projected).normalized();
            Entry { lower: embed_unchecked(&projected, sub), support: c.support(l) }
        })
        .collect();
    DirectedSet::Nested { grid: grid.clone(), entries }
}

/// `J(∂g(x)) - J(∂h(x))` for convex piecewise-affine `g` and `h`.
pub fn dc_directed_subdifferential(g: &Expr, h: &Expr, x: &[f64], grid: &Arc<SphereGrid>) -> Result<DirectedSet> {
    for e in [g, h] {
        if e.arity() != grid.dim() {
            return Err(Error::DimensionMismatch { expected: grid.dim(), found: e.arity() });
        }
    }
    let dg = convex_polyhedral_subdifferential(g, x)?;
    let dh = convex_polyhedral_subdifferential(h, x)?;
    embed(&dg, grid)?.sub(&embed(&dh, grid)?)
}

/// `J(lower) - J(⊖upper)` for a quasidifferential `(lower, upper)`, where
/// `⊖C = {-v : v ∈ C}`.
pub fn qd_directed_subdifferential(lower: &Polytope, upper: &Polytope, grid: &Arc<SphereGrid>) -> Result<DirectedSet> {
    if lower.dim() != upper.dim() {
        return Err(Error::DimensionMismatch { expected: lower.dim(), found: upper.dim() });
    }
    embed(lower, grid)?.sub(&embed(&upper.negated(), grid)?)
}
