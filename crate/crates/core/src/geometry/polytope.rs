use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{add, cross, dot, max_abs, norm, scale, sub};

/// Tolerance for merging vertices and discarding non-extreme points,
/// relative to the coordinate scale of the point set.
pub const EXTREME_TOL: f64 = 1e-9;

/// Tolerance for membership in a supporting face, relative to `max(1, |δ*|)`.
/// Matches the active-set tolerance of the derivative calculus.
pub const FACE_TOL: f64 = 1e-9;

/// A convex polytope given by a finite, nonempty vertex list in `Rⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeDoc")]
pub struct Polytope {
    n: usize,
    vertices: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct PolytopeDoc {
    n: usize,
    vertices: Vec<Vec<f64>>,
}

impl TryFrom<PolytopeDoc> for Polytope {
    type Error = Error;

    fn try_from(doc: PolytopeDoc) -> Result<Self> {
        let p = Polytope::new(doc.vertices)?;
        if p.n != doc.n {
            return Err(Error::DimensionMismatch { expected: doc.n, found: p.n });
        }
        Ok(p)
    }
}

impl Polytope {
    /// Builds a polytope from raw vertices (kept as given, not normalized).
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let n = vertices.first().ok_or(Error::EmptyPolytope)?.len();
        if n == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        for v in &vertices {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("vertex {v:?}")));
            }
        }
        Ok(Self { n, vertices })
    }

    pub fn singleton(point: Vec<f64>) -> Self {
        Self { n: point.len(), vertices: vec![point] }
    }

    pub(crate) fn from_parts(n: usize, vertices: Vec<Vec<f64>>) -> Self {
        debug_assert!(!vertices.is_empty() && vertices.iter().all(|v| v.len() == n));
        Self { n, vertices }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string(self)
    }

    /// `δ*(l, C) = max_{v} ⟨l, v⟩`.
    pub fn support(&self, l: &[f64]) -> f64 {
        self.vertices.iter().map(|v| dot(l, v)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Vertices attaining `δ*(l, C)` within `tol · max(1, |δ*|)`.
    pub fn face(&self, l: &[f64], tol: f64) -> Polytope {
        let values: Vec<f64> = self.vertices.iter().map(|v| dot(l, v)).collect();
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let cut = best - tol * best.abs().max(1.0);
        let vertices = self
            .vertices
            .iter()
            .zip(&values)
            .filter(|(_, &s)| s >= cut)
            .map(|(v, _)| v.clone())
            .collect();
        Polytope::from_parts(self.n, vertices)
    }

    /// `⊖C = {-x : x ∈ C}`.
    pub fn negated(&self) -> Polytope {
        Polytope::from_parts(self.n, self.vertices.iter().map(|v| scale(v, -1.0)).collect())
    }

    /// `λC` for `λ ≥ 0`.
    pub fn scaled(&self, lambda: f64) -> Polytope {
        Polytope::from_parts(self.n, self.vertices.iter().map(|v| scale(v, lambda)).collect())
    }

    /// Minkowski sum: all pairwise vertex sums, pruned to extreme points.
    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Polytope> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let sums = self
            .vertices
            .iter()
            .flat_map(|a| other.vertices.iter().map(move |b| add(a, b)))
            .collect();
        Ok(Polytope::from_parts(self.n, sums).normalized())
    }

    /// Convex hull of the union of vertex sets.
    pub fn hull_union<'a>(parts: impl IntoIterator<Item = &'a Polytope>) -> Result<Polytope> {
        let mut n = None;
        let mut vertices = Vec::new();
        for p in parts {
            match n {
                None => n = Some(p.n),
                Some(m) if m != p.n => return Err(Error::DimensionMismatch { expected: m, found: p.n }),
                _ => {}
            }
            vertices.extend(p.vertices.iter().cloned());
        }
        let n = n.ok_or(Error::EmptyPolytope)?;
        Ok(Polytope::from_parts(n, vertices).normalized())
    }

    /// Removes duplicates and points that are not extreme, keeping the
    /// surviving vertices in their original order.
    pub fn normalized(&self) -> Polytope {
        let keep = extreme_indices(&self.vertices, EXTREME_TOL);
        Polytope::from_parts(self.n, keep.into_iter().map(|i| self.vertices[i].clone()).collect())
    }
}

/// `δ*(l, C)`.
pub fn support_function(c: &Polytope, l: &[f64]) -> Result<f64> {
    if l.len() != c.n {
        return Err(Error::DimensionMismatch { expected: c.n, found: l.len() });
    }
    Ok(c.support(l))
}

/// `Y(l, C)`, the vertices of `C` maximizing `⟨l, ·⟩` up to
/// `tol · max(1, |δ*(l, C)|)`. `Y(0, C) = C`.
pub fn supporting_face(c: &Polytope, l: &[f64], tol: f64) -> Result<Polytope> {
    if l.len() != c.n {
        return Err(Error::DimensionMismatch { expected: c.n, found: l.len() });
    }
    Ok(c.face(l, tol))
}

/// Indices of the extreme points of `points` (dimension ≤ 3).
///
/// Works in the affine hull of the points: after an orthonormal basis of the
/// hull is found, segments, polygons and polyhedra are handled exactly by
/// their own hull routines.
fn extreme_indices(points: &[Vec<f64>], tol: f64) -> Vec<usize> {
    let span = points.iter().map(|p| max_abs(p)).fold(1.0, f64::max);
    let eps = tol * span;

    let mut uniq: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if !uniq.iter().any(|&j| max_abs(&sub(p, &points[j])) <= eps) {
            uniq.push(i);
        }
    }
    if uniq.len() <= 1 {
        return uniq;
    }

    // Gram-Schmidt on the differences to the first point.
    let origin = &points[uniq[0]];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for &i in &uniq[1..] {
        let mut d = sub(&points[i], origin);
        for b in &basis {
            let c = dot(&d, b);
            d = sub(&d, &scale(b, c));
        }
        let len = norm(&d);
        if len > eps {
            basis.push(scale(&d, 1.0 / len));
        }
    }
    let coords: Vec<Vec<f64>> = uniq
        .iter()
        .map(|&i| {
            let d = sub(&points[i], origin);
            basis.iter().map(|b| dot(&d, b)).collect()
        })
        .collect();

    let local = match basis.len() {
        0 => vec![0],
        1 => {
            let (mut lo, mut hi) = (0, 0);
            for (k, c) in coords.iter().enumerate() {
                if c[0] < coords[lo][0] {
                    lo = k;
                }
                if c[0] > coords[hi][0] {
                    hi = k;
                }
            }
            if lo == hi {
                vec![lo]
            } else {
                vec![lo, hi]
            }
        }
        2 => hull2(&coords, eps),
        _ => hull3(&coords, eps),
    };
    let mut out: Vec<usize> = local.into_iter().map(|k| uniq[k]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Vertices of the planar hull (Andrew's monotone chain), collinear points
/// dropped.
fn hull2(pts: &[Vec<f64>], eps: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| {
        pts[a][0].total_cmp(&pts[b][0]).then(pts[a][1].total_cmp(&pts[b][1]))
    });
    let turn = |o: usize, a: usize, b: usize| {
        (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1])
            - (pts[a][1] - pts[o][1]) * (pts[b][0] - pts[o][0])
    };
    // Scale-aware threshold on the cross product.
    let span = pts.iter().map(|p| max_abs(p)).fold(1.0, f64::max);
    let cut = eps * span;
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let seq: Box<dyn Iterator<Item = &usize>> =
            if pass == 0 { Box::new(idx.iter()) } else { Box::new(idx.iter().rev()) };
        for &p in seq {
            while hull.len() >= start + 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= cut {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.is_empty() {
        hull.push(idx[0]);
    }
    hull
}

/// Vertices of a full-dimensional polyhedron in R³: every extreme point is a
/// vertex of some facet polygon, and every facet plane passes through three
/// of the points with all others on one side.
fn hull3(pts: &[Vec<f64>], eps: f64) -> Vec<usize> {
    let m = pts.len();
    let mut extreme = vec![false; m];
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let nrm = cross(&sub(&pts[j], &pts[i]), &sub(&pts[k], &pts[i]));
                let len = norm(&nrm);
                if len <= eps {
                    continue;
                }
                let nrm: Vec<f64> = nrm.iter().map(|x| x / len).collect();
                let h = dot(&nrm, &pts[i]);
                if planes.iter().any(|(q, c)| {
                    (dot(q, &nrm).abs() - 1.0).abs() <= 1e-12 && (dot(q, &pts[i]) - c).abs() <= eps
                }) {
                    continue;
                }
                let side: Vec<f64> = pts.iter().map(|p| dot(&nrm, p) - h).collect();
                let above = side.iter().any(|&s| s > eps);
                let below = side.iter().any(|&s| s < -eps);
                if above && below {
                    continue;
                }
                planes.push((nrm.clone(), h));
                let on: Vec<usize> = (0..m).filter(|&t| side[t].abs() <= eps).collect();
                let u = {
                    let d = sub(&pts[j], &pts[i]);
                    let l = norm(&d);
                    scale(&d, 1.0 / l)
                };
                let w = cross(&nrm, &u).to_vec();
                let flat: Vec<Vec<f64>> = on
                    .iter()
                    .map(|&t| {
                        let d = sub(&pts[t], &pts[i]);
                        vec![dot(&d, &u), dot(&d, &w)]
                    })
                    .collect();
                for f in hull2(&flat, eps) {
                    extreme[on[f]] = true;
                }
            }
        }
    }
    (0..m).filter(|&t| extreme[t]).collect()
}
