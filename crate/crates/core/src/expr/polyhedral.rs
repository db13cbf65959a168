use super::derivative::{active_branches, active_tol};
use super::{Expr, Node};
use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::linalg::{add, scale, sub};

/// Width of the guard band above the active-set tolerance, as a multiple of
/// it. A branch whose gap to the maximum falls inside the band is neither
/// clearly active nor clearly inactive.
const GUARD_FACTOR: f64 = 1e3;

/// Gradient of a subtree that is affine in `x`, or `None`.
///
/// Products and quotients count as affine only when one factor (the
/// denominator, for quotients) is constant. Constant `max`/`min` subtrees
/// are affine with zero gradient.
fn affine_gradient(node: &Node, x: &[f64], n: usize) -> Result<Option<Vec<f64>>> {
    if node.is_constant() {
        return Ok(Some(vec![0.0; n]));
    }
    Ok(match node {
        Node::Const(_) => Some(vec![0.0; n]),
        Node::Affine { coef, .. } => Some(coef.clone()),
        Node::Add(a, b) | Node::Sub(a, b) => {
            match (affine_gradient(a, x, n)?, affine_gradient(b, x, n)?) {
                (Some(ga), Some(gb)) => Some(if matches!(node, Node::Add(..)) { add(&ga, &gb) } else { sub(&ga, &gb) }),
                _ => None,
            }
        }
        Node::Neg(a) => affine_gradient(a, x, n)?.map(|g| scale(&g, -1.0)),
        Node::Mul(a, b) => {
            if a.is_constant() {
                let lambda = a.eval(x)?;
                affine_gradient(b, x, n)?.map(|g| scale(&g, lambda))
            } else if b.is_constant() {
                let lambda = b.eval(x)?;
                affine_gradient(a, x, n)?.map(|g| scale(&g, lambda))
            } else {
                None
            }
        }
        Node::Div(a, b) if b.is_constant() => {
            let den = nonzero_constant(b, x)?;
            affine_gradient(a, x, n)?.map(|g| scale(&g, 1.0 / den))
        }
        Node::Div(..) | Node::Max(_) | Node::Min(_) => None,
    })
}

fn nonzero_constant(node: &Node, x: &[f64]) -> Result<f64> {
    let v = node.eval(x)?;
    if v == 0.0 {
        return Err(super::division_by_zero(node, x));
    }
    Ok(v)
}

fn reject(node: &Node, why: &str) -> Error {
    Error::NotMaxAffine(format!("{why} in `{node}`"))
}

fn subdiff(node: &Node, x: &[f64], n: usize) -> Result<Polytope> {
    if let Some(g) = affine_gradient(node, x, n)? {
        return Ok(Polytope::singleton(g));
    }
    match node {
        Node::Add(a, b) => subdiff(a, x, n)?.minkowski_sum(&subdiff(b, x, n)?),
        Node::Sub(a, b) => match affine_gradient(b, x, n)? {
            Some(g) => subdiff(a, x, n)?.minkowski_sum(&Polytope::singleton(scale(&g, -1.0))),
            None => Err(reject(node, "subtraction of a non-affine term")),
        },
        Node::Neg(_) => Err(reject(node, "negation of a non-affine term")),
        Node::Mul(a, b) => {
            let (c, other) = if a.is_constant() {
                (a, b)
            } else if b.is_constant() {
                (b, a)
            } else {
                return Err(reject(node, "product of two non-constant terms"));
            };
            let lambda = c.eval(x)?;
            if lambda < 0.0 {
                return Err(reject(node, "negative multiple of a non-affine term"));
            }
            Ok(subdiff(other, x, n)?.scaled(lambda).normalized())
        }
        Node::Div(a, b) => {
            if !b.is_constant() {
                return Err(reject(node, "quotient with a non-constant denominator"));
            }
            let den = nonzero_constant(b, x)?;
            if den < 0.0 {
                return Err(reject(node, "division of a non-affine term by a negative constant"));
            }
            Ok(subdiff(a, x, n)?.scaled(1.0 / den).normalized())
        }
        Node::Max(cs) => {
            let values = cs.iter().map(|c| c.eval(x)).collect::<Result<Vec<_>>>()?;
            let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let tol = active_tol(best);
            for &v in &values {
                let gap = best - v;
                if gap > tol && gap <= GUARD_FACTOR * tol {
                    return Err(Error::AmbiguousActiveSet { gap, tol });
                }
            }
            let parts = active_branches(values.iter().copied(), true)
                .into_iter()
                .map(|i| subdiff(&cs[i], x, n))
                .collect::<Result<Vec<_>>>()?;
            Polytope::hull_union(parts.iter())
        }
        Node::Min(_) => Err(reject(node, "min of non-constant terms")),
        Node::Const(_) | Node::Affine { .. } => unreachable!("affine leaves are handled above"),
    }
}

/// `∂f(x)` for a convex piecewise-affine `f` written as nonnegative
/// combinations and maxima of affine pieces.
///
/// Sums become Minkowski sums, nonnegative multiples scale, and a `max`
/// takes the hull of its active branches. Anything else (a `min`, a genuine
/// product or quotient, a negated or subtracted `max`) is rejected. A branch
/// that misses the active set by less than a thousand tolerances is
/// reported as ambiguous rather than guessed.
pub fn convex_polyhedral_subdifferential(f: &Expr, x: &[f64]) -> Result<Polytope> {
    f.check_point(x)?;
    let n = f.arity();
    Ok(subdiff(f.root(), x, n)?.normalized())
}
