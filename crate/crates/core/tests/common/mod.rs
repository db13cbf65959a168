//! Seeded generators for random test instances.
//!
//! Coefficients and points are dyadic rationals of small height, so sums
//! and differences of affine pieces are exact in `f64` and branch ties at
//! the base point hold bit for bit.

#![allow(dead_code)]

use dirsub_core::expr::Node;
use dirsub_core::{Expr, Polytope};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A multiple of `1/denom` in `[lo, hi]`.
pub fn dyadic(rng: &mut ChaCha8Rng, lo: f64, hi: f64, denom: f64) -> f64 {
    let a = (lo * denom).ceil() as i64;
    let b = (hi * denom).floor() as i64;
    rng.gen_range(a..=b) as f64 / denom
}

pub fn dyadic_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| dyadic(rng, -2.0, 2.0, 16.0)).collect()
}

/// A nonzero direction with dyadic entries in `[-1, 1]` (not normalized).
pub fn dyadic_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| dyadic(rng, -1.0, 1.0, 8.0)).collect();
        if v.iter().any(|&a| a != 0.0) {
            return v;
        }
    }
}

pub fn unit_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if len > 1e-2 && len <= 1.0 {
            return v.into_iter().map(|a| a / len).collect();
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// `max` of up to `max_terms` affine pieces with coefficients in `[-3, 3]`.
///
/// A random nonempty subset of the pieces is active at `x` with a common
/// value; the others sit at least `1/4` below it.
pub fn random_max_affine(rng: &mut ChaCha8Rng, x: &[f64], max_terms: usize) -> Expr {
    let n = x.len();
    let m = rng.gen_range(1..=max_terms);
    let active = rng.gen_range(1..=m);
    let level = dyadic(rng, -2.0, 2.0, 8.0);
    let pieces = (0..m)
        .map(|i| {
            let coef: Vec<f64> = (0..n).map(|_| dyadic(rng, -3.0, 3.0, 8.0)).collect();
            let gap = if i < active { 0.0 } else { dyadic(rng, 0.25, 2.0, 8.0) };
            let offset = level - gap - dot(&coef, x);
            Node::Affine { coef, offset }
        })
        .collect();
    Expr::new(n, Node::max_of(pieces)).unwrap()
}

/// Convex hull of 3 to 8 points drawn uniformly from `[-3, 3]^n`.
pub fn random_polytope(rng: &mut ChaCha8Rng, n: usize) -> Polytope {
    let k = rng.gen_range(3..=8);
    let pts = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect();
    Polytope::new(pts).unwrap()
}

pub struct ExprGen {
    pub n: usize,
    /// Allow products and quotients.
    pub smooth_ops: bool,
}

impl ExprGen {
    /// A random tree of depth at most `depth` whose `max`/`min` nodes have
    /// exact ties at `x` with probability one half.
    pub fn node(&self, rng: &mut ChaCha8Rng, x: &[f64], depth: usize) -> Node {
        if depth <= 1 || rng.gen_bool(0.2) {
            return self.leaf(rng);
        }
        let kinds: &[u8] = if self.smooth_ops { &[0, 1, 2, 3, 4, 5, 5, 6, 6, 7] } else { &[0, 1, 2, 5, 5, 6, 6, 7] };
        let sub = |rng: &mut ChaCha8Rng| Box::new(self.node(rng, x, depth - 1));
        match *kinds.choose(rng).unwrap() {
            0 => Node::Add(sub(rng), sub(rng)),
            1 => Node::Sub(sub(rng), sub(rng)),
            2 => Node::Mul(Box::new(Node::Const(dyadic(rng, -2.0, 2.0, 4.0))), sub(rng)),
            3 => Node::Mul(sub(rng), sub(rng)),
            4 => Node::Div(sub(rng), sub(rng)),
            7 => Node::Neg(sub(rng)),
            kind => {
                let count = rng.gen_range(2..=4);
                let mut children: Vec<Node> = (0..count).map(|_| self.node(rng, x, depth - 1)).collect();
                if rng.gen_bool(0.5) {
                    self.force_tie(rng, x, &mut children);
                }
                if kind == 5 {
                    Node::Max(children)
                } else {
                    Node::Min(children)
                }
            }
        }
    }

    fn leaf(&self, rng: &mut ChaCha8Rng) -> Node {
        if rng.gen_bool(0.1) {
            return Node::Const(dyadic(rng, -3.0, 3.0, 8.0));
        }
        let coef = (0..self.n).map(|_| dyadic(rng, -3.0, 3.0, 8.0)).collect();
        Node::Affine { coef, offset: dyadic(rng, -2.0, 2.0, 8.0) }
    }

    /// Shifts some children by constants so they equal the first at `x`.
    fn force_tie(&self, rng: &mut ChaCha8Rng, x: &[f64], children: &mut [Node]) {
        let probe = |node: &Node| Expr::new(self.n, node.clone()).ok().and_then(|e| e.eval(x).ok());
        let Some(target) = probe(&children[0]) else { return };
        for child in children.iter_mut().skip(1) {
            if rng.gen_bool(0.5) {
                if let Some(v) = probe(child) {
                    let shifted = Node::Add(Box::new(child.clone()), Box::new(Node::Const(target - v)));
                    *child = shifted;
                }
            }
        }
    }

    pub fn expr(&self, rng: &mut ChaCha8Rng, x: &[f64], depth: usize) -> Expr {
        Expr::new(self.n, self.node(rng, x, depth)).unwrap()
    }
}

/// Smallest `|denominator|` over all quotient nodes at `x`, or `None` if
/// some evaluation fails.
pub fn min_denominator(node: &Node, x: &[f64], n: usize) -> Option<f64> {
    let eval = |node: &Node| Expr::new(n, node.clone()).ok()?.eval(x).ok();
    let here = match node {
        Node::Div(_, b) => eval(b)?.abs(),
        _ => f64::INFINITY,
    };
    let below = match node {
        Node::Const(_) | Node::Affine { .. } => f64::INFINITY,
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            min_denominator(a, x, n)?.min(min_denominator(b, x, n)?)
        }
        Node::Neg(a) => min_denominator(a, x, n)?,
        Node::Max(cs) | Node::Min(cs) => {
            let mut m = f64::INFINITY;
            for c in cs {
                m = m.min(min_denominator(c, x, n)?);
            }
            m
        }
    };
    Some(here.min(below))
}

pub fn has_smooth_ops(node: &Node) -> bool {
    match node {
        Node::Const(_) | Node::Affine { .. } => false,
        Node::Mul(a, b) => !(a.is_constant() || b.is_constant()) || has_smooth_ops(a) || has_smooth_ops(b),
        Node::Div(..) => true,
        Node::Add(a, b) | Node::Sub(a, b) => has_smooth_ops(a) || has_smooth_ops(b),
        Node::Neg(a) => has_smooth_ops(a),
        Node::Max(cs) | Node::Min(cs) => cs.iter().any(has_smooth_ops),
    }
}
