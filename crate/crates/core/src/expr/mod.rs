//! Expressions over `n` real variables built from affine atoms, `+ - * /`,
//! `min`, `max` and unary minus.
//!
//! `abs(e)` is accepted by the parser and stored as `max(e, -e)`. Variables
//! are affine atoms too (`x2` is `⟨e², x⟩ + 0`), which is what makes
//! [`substitute_affine`] a purely local rewrite.

mod derivative;
mod parse;
mod polyhedral;

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::dot;

pub use derivative::{active_tol, dd_function, dini_dd, ACTIVE_REL_TOL};
pub use parse::{max_variable_index, parse};
pub use polyhedral::convex_polyhedral_subdifferential;

/// One node of an expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    /// `⟨coef, x⟩ + offset`.
    Affine { coef: Vec<f64>, offset: f64 },
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    /// At least two children; a single child is stored as itself.
    Max(Vec<Node>),
    Min(Vec<Node>),
}

impl Node {
    /// `max` of `children`, collapsing a single child. Panics on an empty list.
    pub fn max_of(mut children: Vec<Node>) -> Node {
        assert!(!children.is_empty(), "max over an empty list");
        if children.len() == 1 {
            children.pop().unwrap()
        } else {
            Node::Max(children)
        }
    }

    /// `min` of `children`, collapsing a single child. Panics on an empty list.
    pub fn min_of(mut children: Vec<Node>) -> Node {
        assert!(!children.is_empty(), "min over an empty list");
        if children.len() == 1 {
            children.pop().unwrap()
        } else {
            Node::Min(children)
        }
    }

    pub fn var(arity: usize, index: usize) -> Node {
        let mut coef = vec![0.0; arity];
        coef[index] = 1.0;
        Node::Affine { coef, offset: 0.0 }
    }

    fn check_arity(&self, arity: usize) -> Result<()> {
        match self {
            Node::Const(c) => finite(*c),
            Node::Affine { coef, offset } => {
                if coef.len() != arity {
                    return Err(Error::DimensionMismatch { expected: arity, found: coef.len() });
                }
                coef.iter().try_for_each(|c| finite(*c))?;
                finite(*offset)
            }
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.check_arity(arity)?;
                b.check_arity(arity)
            }
            Node::Neg(a) => a.check_arity(arity),
            Node::Max(cs) | Node::Min(cs) => {
                if cs.is_empty() {
                    return Err(Error::Malformed("min/max without arguments".into()));
                }
                cs.iter().try_for_each(|c| c.check_arity(arity))
            }
        }
    }

    pub(crate) fn eval(&self, x: &[f64]) -> Result<f64> {
        let v = match self {
            Node::Const(c) => *c,
            Node::Affine { coef, offset } => dot(coef, x) + offset,
            Node::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Node::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Node::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Node::Div(a, b) => {
                let num = a.eval(x)?;
                let den = b.eval(x)?;
                if den == 0.0 {
                    return Err(division_by_zero(b, x));
                }
                num / den
            }
            Node::Neg(a) => -a.eval(x)?,
            Node::Max(cs) => {
                let mut best = f64::NEG_INFINITY;
                for c in cs {
                    best = best.max(c.eval(x)?);
                }
                best
            }
            Node::Min(cs) => {
                let mut best = f64::INFINITY;
                for c in cs {
                    best = best.min(c.eval(x)?);
                }
                best
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("value of `{}` at {x:?}", Display(self))))
        }
    }

    fn substitute(&self, a: &[Vec<f64>], b: &[f64], k: usize) -> Node {
        match self {
            Node::Const(c) => Node::Const(*c),
            Node::Affine { coef, offset } => {
                let new_coef = (0..k)
                    .map(|j| (0..coef.len()).fold(0.0, |acc, i| acc + a[i][j] * coef[i]))
                    .collect();
                Node::Affine { coef: new_coef, offset: dot(coef, b) + offset }
            }
            Node::Add(p, q) => Node::Add(Box::new(p.substitute(a, b, k)), Box::new(q.substitute(a, b, k))),
            Node::Sub(p, q) => Node::Sub(Box::new(p.substitute(a, b, k)), Box::new(q.substitute(a, b, k))),
            Node::Mul(p, q) => Node::Mul(Box::new(p.substitute(a, b, k)), Box::new(q.substitute(a, b, k))),
            Node::Div(p, q) => Node::Div(Box::new(p.substitute(a, b, k)), Box::new(q.substitute(a, b, k))),
            Node::Neg(p) => Node::Neg(Box::new(p.substitute(a, b, k))),
            Node::Max(cs) => Node::Max(cs.iter().map(|c| c.substitute(a, b, k)).collect()),
            Node::Min(cs) => Node::Min(cs.iter().map(|c| c.substitute(a, b, k)).collect()),
        }
    }

    /// True when no affine atom has a nonzero coefficient.
    pub fn is_constant(&self) -> bool {
        match self {
            Node::Const(_) => true,
            Node::Affine { coef, .. } => coef.iter().all(|&c| c == 0.0),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
            Node::Neg(a) => a.is_constant(),
            Node::Max(cs) | Node::Min(cs) => cs.iter().all(Node::is_constant),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self {
            Node::Const(_) | Node::Affine { .. } => 0,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => a.size() + b.size(),
            Node::Neg(a) => a.size(),
            Node::Max(cs) | Node::Min(cs) => cs.iter().map(Node::size).sum(),
        }
    }
}

fn finite(v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("constant {v}")))
    }
}

pub(crate) fn division_by_zero(den: &Node, x: &[f64]) -> Error {
    Error::DivisionByZero { location: format!("`{}` at x = {x:?}", Display(den)) }
}

/// A real-valued function of `arity` variables.
///
/// Immutable after construction; every operation returns a new value.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    arity: usize,
    root: Node,
}

impl Expr {
    /// Checks that every affine atom has `arity` coefficients and that all
    /// constants are finite.
    pub fn new(arity: usize, root: Node) -> Result<Self> {
        if arity == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        root.check_arity(arity)?;
        Ok(Self { arity, root })
    }

    pub(crate) fn from_parts(arity: usize, root: Node) -> Self {
        Self { arity, root }
    }

    pub fn constant(arity: usize, c: f64) -> Self {
        Self { arity, root: Node::Const(c) }
    }

    pub fn affine(coef: Vec<f64>, offset: f64) -> Result<Self> {
        Expr::new(coef.len(), Node::Affine { coef, offset })
    }

    /// The variable `x_{index+1}` (zero-based `index`).
    pub fn var(arity: usize, index: usize) -> Self {
        Self { arity, root: Node::var(arity, index) }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn into_root(self) -> Node {
        self.root
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        self.root.eval(x)
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.arity {
            return Err(Error::DimensionMismatch { expected: self.arity, found: x.len() });
        }
        x.iter().try_for_each(|v| finite(*v))
    }

    pub fn max_of(parts: Vec<Expr>) -> Result<Expr> {
        let arity = same_arity(&parts)?;
        Ok(Expr { arity, root: Node::max_of(parts.into_iter().map(Expr::into_root).collect()) })
    }

    pub fn min_of(parts: Vec<Expr>) -> Result<Expr> {
        let arity = same_arity(&parts)?;
        Ok(Expr { arity, root: Node::min_of(parts.into_iter().map(Expr::into_root).collect()) })
    }

    /// `α f + β g`.
    pub fn linear_comb(alpha: f64, f: &Expr, beta: f64, g: &Expr) -> Result<Expr> {
        same_arity(&[f.clone(), g.clone()])?;
        let lhs = Node::Mul(Box::new(Node::Const(alpha)), Box::new(f.root.clone()));
        let rhs = Node::Mul(Box::new(Node::Const(beta)), Box::new(g.root.clone()));
        Expr::new(f.arity, Node::Add(Box::new(lhs), Box::new(rhs)))
    }

    /// `f - g`.
    pub fn difference(f: &Expr, g: &Expr) -> Result<Expr> {
        same_arity(&[f.clone(), g.clone()])?;
        Ok(Expr { arity: f.arity, root: Node::Sub(Box::new(f.root.clone()), Box::new(g.root.clone())) })
    }
}

fn same_arity(parts: &[Expr]) -> Result<usize> {
    let first = parts.first().ok_or_else(|| Error::Malformed("min/max without arguments".into()))?;
    for p in parts {
        if p.arity != first.arity {
            return Err(Error::DimensionMismatch { expected: first.arity, found: p.arity });
        }
    }
    Ok(first.arity)
}

/// `g(y) = f(A y + b)` for an `m × k` matrix `A` (given as `m` rows) and
/// `b ∈ R^m`, where `m` is the arity of `f`. Every atom `⟨c, ·⟩ + β` becomes
/// `⟨Aᵀc, ·⟩ + (⟨c, b⟩ + β)`; nothing else changes.
pub fn substitute_affine(f: &Expr, a: &[Vec<f64>], b: &[f64]) -> Result<Expr> {
    let m = f.arity;
    if a.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: a.len() });
    }
    if b.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: b.len() });
    }
    let k = a[0].len();
    if k == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    if let Some(row) = a.iter().find(|r| r.len() != k) {
        return Err(Error::DimensionMismatch { expected: k, found: row.len() });
    }
    Ok(Expr { arity: k, root: f.root.substitute(a, b, k) })
}

struct Display<'a>(&'a Node);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, self.0)
    }
}

fn unit_index(coef: &[f64]) -> Option<usize> {
    let mut hit = None;
    for (i, &c) in coef.iter().enumerate() {
        if c == 1.0 && c.is_sign_positive() && hit.is_none() {
            hit = Some(i);
        } else if c != 0.0 || c.is_sign_negative() {
            return None;
        }
    }
    hit
}

fn write_list(f: &mut fmt::Formatter<'_>, name: &str, cs: &[Node]) -> fmt::Result {
    write!(f, "{name}(")?;
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write_node(f, c)?;
    }
    write!(f, ")")
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &Node) -> fmt::Result {
    match node {
        Node::Const(c) => write!(f, "{c}"),
        Node::Affine { coef, offset } => match unit_index(coef) {
            Some(i) if *offset == 0.0 && offset.is_sign_positive() => write!(f, "x{}", i + 1),
            _ => {
                write!(f, "(")?;
                for (i, c) in coef.iter().enumerate() {
                    write!(f, "{c}*x{} + ", i + 1)?;
                }
                write!(f, "{offset})")
            }
        },
        Node::Add(a, b) => binary(f, a, "+", b),
        Node::Sub(a, b) => binary(f, a, "-", b),
        Node::Mul(a, b) => binary(f, a, "*", b),
        Node::Div(a, b) => binary(f, a, "/", b),
        Node::Neg(a) => {
            write!(f, "-(")?;
            write_node(f, a)?;
            write!(f, ")")
        }
        Node::Max(cs) => write_list(f, "max", cs),
        Node::Min(cs) => write_list(f, "min", cs),
    }
}

fn binary(f: &mut fmt::Formatter<'_>, a: &Node, op: &str, b: &Node) -> fmt::Result {
    write!(f, "(")?;
    write_node(f, a)?;
    write!(f, " {op} ")?;
    write_node(f, b)?;
    write!(f, ")")
}

/// Text accepted by [`parse`]. Parsing the output of a parsed expression
/// reproduces the same tree; affine atoms other than plain variables are
/// written as explicit sums and read back as equivalent arithmetic.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn p(text: &str, n: usize) -> Expr {
        parse(text, n).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = p("max(abs(x1),abs(x2))", 2);
        let s3 = 3f64.sqrt() / 2.0;
        assert_eq!(f.eval(&[0.5, s3]).unwrap(), s3);
        let g = p("min(abs(x1-x2),abs(x1-x2/2),abs(x1-x2/3),abs(x1-x2/4),abs(x1-x2/5))", 2);
        // Brute force over the five branches.
        let brute = (1..=5).map(|k| (0.2 - 1.0 / k as f64).abs()).fold(f64::INFINITY, f64::min);
        assert_eq!(brute, 0.0);
        assert_eq!(g.eval(&[0.2, 1.0]).unwrap(), brute);
        assert_eq!(p("x1*x1", 1).eval(&[2.0]).unwrap(), 4.0);
    }

    #[test]
    fn eval_errors() {
        let f = p("1/(x1-1)", 1);
        assert!(matches!(f.eval(&[1.0]), Err(Error::DivisionByZero { .. })));
        assert!(matches!(f.eval(&[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn substitute_examples() {
        let f = p("max(abs(x1),abs(x2))", 2);
        let l = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
        let a = vec![vec![l[1]], vec![-l[0]]];
        let g = substitute_affine(&f, &a, &l).unwrap();
        assert_eq!(g.arity(), 1);
        for y in [-2.0, -0.3, 0.0, 0.7, 1.9] {
            let expected = (l[0] + y * l[1]).abs().max((l[1] - y * l[0]).abs());
            assert!((g.eval(&[y]).unwrap() - expected).abs() < 1e-15);
        }

        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(substitute_affine(&f, &id, &[0.0, 0.0]).unwrap(), f);

        let h = Expr::affine(vec![1.0, 1.0], 0.0).unwrap();
        let s = substitute_affine(&h, &[vec![2.0], vec![0.0]], &[0.0, 3.0]).unwrap();
        assert_eq!(s.root(), &Node::Affine { coef: vec![2.0], offset: 3.0 });

        assert!(substitute_affine(&f, &[vec![1.0]], &[0.0, 0.0]).is_err());
        assert!(substitute_affine(&f, &a, &[0.0]).is_err());
    }

    #[test]
    fn display_of_general_atoms_evaluates_the_same() {
        let f = Expr::affine(vec![-2.5, 0.0, 1.0], 0.75).unwrap();
        let g = p(&f.to_string(), 3);
        for x in [[0.0, 0.0, 0.0], [1.0, -2.0, 3.5]] {
            assert_eq!(f.eval(&x).unwrap(), g.eval(&x).unwrap());
        }
    }

    #[test]
    fn construction_validates_arity() {
        let bad = Node::Add(Box::new(Node::var(2, 0)), Box::new(Node::var(3, 0)));
        assert!(Expr::new(2, bad).is_err());
        assert!(Expr::max_of(vec![Expr::var(1, 0), Expr::var(2, 0)]).is_err());
        assert_eq!(Expr::max_of(vec![Expr::var(2, 1)]).unwrap(), Expr::var(2, 1));
    }
}
