//! One-sided directional derivatives by forward-mode propagation of
//! (value, derivative) pairs.

use super::{division_by_zero, Expr, Node};
use crate::error::{Error, Result};
use crate::linalg::dot;

/// Relative tolerance for deciding which branches of a `max`/`min` are active.
pub const ACTIVE_REL_TOL: f64 = 1e-9;

/// Absolute active-set tolerance at a branch value of magnitude `extreme`.
pub fn active_tol(extreme: f64) -> f64 {
    ACTIVE_REL_TOL * extreme.abs().max(1.0)
}

fn checked(v: f64, what: &str, x: &[f64]) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("{what} at x = {x:?}")))
    }
}

fn pair(node: &Node, x: &[f64], d: &[f64]) -> Result<(f64, f64)> {
    let (v, dv) = match node {
        Node::Const(c) => (*c, 0.0),
        Node::Affine { coef, offset } => (dot(coef, x) + offset, dot(coef, d) + 0.0),
        Node::Add(a, b) => {
            let (va, da) = pair(a, x, d)?;
            let (vb, db) = pair(b, x, d)?;
            (va + vb, da + db)
        }
        Node::Sub(a, b) => {
            let (va, da) = pair(a, x, d)?;
            let (vb, db) = pair(b, x, d)?;
            (va - vb, da - db)
        }
        Node::Mul(a, b) => {
            let (va, da) = pair(a, x, d)?;
            let (vb, db) = pair(b, x, d)?;
            (va * vb, va * db + vb * da)
        }
        Node::Div(a, b) => {
            let (va, da) = pair(a, x, d)?;
            let (vb, db) = pair(b, x, d)?;
            if vb == 0.0 {
                return Err(division_by_zero(b, x));
            }
            let den = vb * vb;
            if den == 0.0 {
                return Err(Error::NonFinite(format!("squared denominator underflows at x = {x:?}")));
            }
            (va / vb, (vb * da - va * db) / den)
        }
        Node::Neg(a) => {
            let (va, da) = pair(a, x, d)?;
            (-va, -da)
        }
        Node::Max(cs) | Node::Min(cs) => {
            let is_max = matches!(node, Node::Max(_));
            let pairs = cs.iter().map(|c| pair(c, x, d)).collect::<Result<Vec<_>>>()?;
            let active = active_branches(pairs.iter().map(|p| p.0), is_max);
            let v = extreme(pairs.iter().map(|p| p.0), is_max);
            let dv = extreme(active.iter().map(|&i| pairs[i].1), is_max);
            (v, dv)
        }
    };
    Ok((checked(v, "function value", x)?, checked(dv, "directional derivative", x)?))
}

fn extreme(values: impl Iterator<Item = f64>, is_max: bool) -> f64 {
    if is_max {
        values.fold(f64::NEG_INFINITY, f64::max)
    } else {
        values.fold(f64::INFINITY, f64::min)
    }
}

/// Indices of branches within [`active_tol`] of the extreme value.
pub(crate) fn active_branches(values: impl Iterator<Item = f64> + Clone, is_max: bool) -> Vec<usize> {
    let best = extreme(values.clone(), is_max);
    let tol = active_tol(best);
    values
        .enumerate()
        .filter(|(_, v)| if is_max { *v >= best - tol } else { *v <= best + tol })
        .map(|(i, _)| i)
        .collect()
}

/// `f'(x; d)`, the one-sided directional derivative.
///
/// `max` and `min` nodes take the extreme derivative over their active
/// branches, products and quotients use the usual rules. Fails when a
/// denominator vanishes at `x` or a value is not finite.
pub fn dini_dd(f: &Expr, x: &[f64], d: &[f64]) -> Result<f64> {
    f.check_point(x)?;
    f.check_point(d)?;
    Ok(pair(f.root(), x, d)?.1)
}

fn build(node: &Node, x: &[f64]) -> Result<(f64, Node)> {
    let out = match node {
        Node::Const(c) => (*c, Node::Const(0.0)),
        Node::Affine { coef, offset } => {
            (dot(coef, x) + offset, Node::Affine { coef: coef.clone(), offset: 0.0 })
        }
        Node::Add(a, b) => {
            let (va, pa) = build(a, x)?;
            let (vb, pb) = build(b, x)?;
            (va + vb, Node::Add(Box::new(pa), Box::new(pb)))
        }
        Node::Sub(a, b) => {
            let (va, pa) = build(a, x)?;
            let (vb, pb) = build(b, x)?;
            (va - vb, Node::Sub(Box::new(pa), Box::new(pb)))
        }
        Node::Mul(a, b) => {
            let (va, pa) = build(a, x)?;
            let (vb, pb) = build(b, x)?;
            let lhs = Node::Mul(Box::new(Node::Const(va)), Box::new(pb));
            let rhs = Node::Mul(Box::new(Node::Const(vb)), Box::new(pa));
            (va * vb, Node::Add(Box::new(lhs), Box::new(rhs)))
        }
        Node::Div(a, b) => {
            let (va, pa) = build(a, x)?;
            let (vb, pb) = build(b, x)?;
            if vb == 0.0 {
                return Err(division_by_zero(b, x));
            }
            let den = vb * vb;
            if den == 0.0 {
                return Err(Error::NonFinite(format!("squared denominator underflows at x = {x:?}")));
            }
            let lhs = Node::Mul(Box::new(Node::Const(vb)), Box::new(pa));
            let rhs = Node::Mul(Box::new(Node::Const(va)), Box::new(pb));
            let num = Node::Sub(Box::new(lhs), Box::new(rhs));
            (va / vb, Node::Div(Box::new(num), Box::new(Node::Const(den))))
        }
        Node::Neg(a) => {
            let (va, pa) = build(a, x)?;
            (-va, Node::Neg(Box::new(pa)))
        }
        Node::Max(cs) | Node::Min(cs) => {
            let is_max = matches!(node, Node::Max(_));
            let built = cs.iter().map(|c| build(c, x)).collect::<Result<Vec<_>>>()?;
            let values = built.iter().map(|b| b.0);
            let active = active_branches(values.clone(), is_max);
            let v = extreme(values, is_max);
            let mut kept: Vec<Node> = Vec::with_capacity(active.len());
            let mut built: Vec<Option<Node>> = built.into_iter().map(|b| Some(b.1)).collect();
            for i in active {
                kept.push(built[i].take().expect("active index repeated"));
            }
            (v, if is_max { Node::max_of(kept) } else { Node::min_of(kept) })
        }
    };
    checked(out.0, "function value", x)?;
    Ok(out)
}

/// The map `d ↦ f'(x; d)` as an expression in `d`.
///
/// The result is positively homogeneous and piecewise linear. Evaluating it
/// at `d` performs the same floating-point operations as [`dini_dd`], so
/// both agree exactly.
pub fn dd_function(f: &Expr, x: &[f64]) -> Result<Expr> {
    f.check_point(x)?;
    let (_, phi) = build(f.root(), x)?;
    Ok(Expr::from_parts(f.arity(), phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn kinks_and_smooth_parts() {
        let f = parse("max(abs(x1),abs(x2))", 2).unwrap();
        assert_eq!(dini_dd(&f, &[0.0, 0.0], &[0.6, -0.8]).unwrap(), 0.8);
        assert_eq!(dini_dd(&f, &[1.0, 1.0], &[-1.0, 0.5]).unwrap(), 0.5);
        let g = parse("abs(x1)", 1).unwrap();
        assert_eq!(dini_dd(&g, &[0.0], &[-1.0]).unwrap(), 1.0);
        assert_eq!(dini_dd(&g, &[0.0], &[1.0]).unwrap(), 1.0);
        let h = parse("min(x1, -x1)", 1).unwrap();
        assert_eq!(dini_dd(&h, &[0.0], &[1.0]).unwrap(), -1.0);
        assert_eq!(dini_dd(&h, &[0.0], &[-1.0]).unwrap(), -1.0);
    }

    #[test]
    fn product_and_quotient_rules() {
        let f = parse("x1*x2", 2).unwrap();
        assert_eq!(dini_dd(&f, &[2.0, 3.0], &[1.0, 0.0]).unwrap(), 3.0);
        // d/dx (x / (1 + x)) = 1 / (1 + x)^2
        let q = parse("x1/(1+x1)", 1).unwrap();
        assert_eq!(dini_dd(&q, &[1.0], &[1.0]).unwrap(), 0.25);
        // (1 / |x|)' at x = 2 in direction -1 is +1/4
        let r = parse("1/abs(x1)", 1).unwrap();
        assert_eq!(dini_dd(&r, &[2.0], &[-1.0]).unwrap(), 0.25);
    }

    #[test]
    fn division_by_zero_is_reported() {
        let q = parse("1/(x1 - x2)", 2).unwrap();
        let err = dini_dd(&q, &[1.0, 1.0], &[1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::DivisionByZero { .. }));
        assert!(err.to_string().contains("x1 - x2"), "{err}");
    }

    #[test]
    fn dd_function_agrees_bitwise() {
        let f = parse("max(x1*x2, x1/(2 + x2)) - min(abs(x1), 3*x2 - x1)", 2).unwrap();
        let x = [0.0, 0.0];
        let phi = dd_function(&f, &x).unwrap();
        for d in [[1.0, 0.0], [0.3, -0.7], [-0.9, 0.1], [0.0, -1.0]] {
            assert_eq!(phi.eval(&d).unwrap(), dini_dd(&f, &x, &d).unwrap());
        }
    }

    #[test]
    fn active_set_uses_relative_tolerance() {
        assert_eq!(active_branches([1e10, 1e10 - 1.0, 0.0].into_iter(), true), vec![0, 1]);
        assert_eq!(active_branches([1.0, 1.0 - 1e-8].into_iter(), true), vec![0]);
        assert_eq!(active_branches([0.0, 5e-10].into_iter(), false), vec![0, 1]);
    }
}
