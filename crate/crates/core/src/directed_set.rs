//! Directed intervals and directed sets sampled on a direction grid.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{GridSpec, SphereGrid};

/// A directed interval stored by its values at the directions `-1` and `+1`.
///
/// `[a, b]` is stored as `(neg, pos) = (-a, b)`. Any pair of finite numbers is
/// allowed, so `a > b` ("inverted" intervals) can occur.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedInterval {
    pub neg: f64,
    pub pos: f64,
}

impl DirectedInterval {
    /// The embedding of the ordinary interval `[a, b]`, i.e. `(-a, b)`.
    pub fn from_interval(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::NonFinite(format!("interval [{a}, {b}]")));
        }
        if a > b {
            return Err(Error::InvalidInterval { lo: a, hi: b });
        }
        Ok(Self { neg: -a, pos: b })
    }

    /// `(neg, pos)` taken as is.
    pub fn raw(neg: f64, pos: f64) -> Self {
        Self { neg, pos }
    }

    /// Left endpoint `a = -neg`.
    pub fn lo(&self) -> f64 {
        -self.neg
    }

    /// Right endpoint `b = pos`.
    pub fn hi(&self) -> f64 {
        self.pos
    }

    /// True when the left endpoint exceeds the right one.
    pub fn is_inverted(&self) -> bool {
        self.lo() > self.hi()
    }

    pub fn norm(&self) -> f64 {
        self.neg.abs().max(self.pos.abs())
    }

    fn comb(alpha: f64, a: &Self, beta: f64, b: &Self) -> Self {
        Self { neg: alpha * a.neg + beta * b.neg, pos: alpha * a.pos + beta * b.pos }
    }
}

impl fmt::Display for DirectedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]→", self.lo(), self.hi())
    }
}

/// One grid direction's data: the `(n-1)`-dimensional part and the value
/// of the top-level function.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub lower: DirectedSet,
    pub support: f64,
}

/// An element of the space of directed sets in `R^n`, `n ∈ {1, 2, 3}`.
///
/// For `n ≥ 2` the value carries the grid it was sampled on, and binary
/// operations refuse operands sampled on different grids.
#[derive(Debug, Clone, PartialEq)]
pub enum DirectedSet {
    Interval(DirectedInterval),
    Nested { grid: Arc<SphereGrid>, entries: Vec<Entry> },
}

/// Which number of an entry a comparison points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Support,
    Neg,
    Pos,
}

/// Result of comparing two directed sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DsComparison {
    /// `‖A - B‖`.
    pub discrepancy: f64,
    /// Grid directions leading from the top level to the worst component.
    pub path: Vec<Vec<f64>>,
    pub component: Component,
    pub equal: bool,
}

impl DirectedSet {
    pub fn interval(neg: f64, pos: f64) -> Self {
        DirectedSet::Interval(DirectedInterval::raw(neg, pos))
    }

    /// Builds a nested value after checking it against `grid`.
    pub fn nested(grid: Arc<SphereGrid>, entries: Vec<Entry>) -> Result<Self> {
        if grid.dim() < 2 {
            return Err(Error::GridMismatch("nested directed sets need n ≥ 2".into()));
        }
        if entries.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} entries for a grid of {} directions",
                entries.len(),
                grid.len()
            )));
        }
        let sub = grid.spec().sub();
        for e in &entries {
            if Some(e.lower.grid_spec()) != sub {
                return Err(Error::GridMismatch("lower part is not on the sub-grid".into()));
            }
            if !e.support.is_finite() {
                return Err(Error::NonFinite("support value".into()));
            }
        }
        Ok(DirectedSet::Nested { grid, entries })
    }

    /// The zero element on `grid`.
    pub fn zero(grid: &Arc<SphereGrid>) -> Self {
        match grid.sub_grid() {
            None => DirectedSet::interval(0.0, 0.0),
            Some(sub) => {
                let lower = DirectedSet::zero(sub);
                let entries = (0..grid.len()).map(|_| Entry { lower: lower.clone(), support: 0.0 }).collect();
                DirectedSet::Nested { grid: grid.clone(), entries }
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DirectedSet::Interval(_) => 1,
            DirectedSet::Nested { grid, .. } => grid.dim(),
        }
    }

    pub fn grid(&self) -> Option<&Arc<SphereGrid>> {
        match self {
            DirectedSet::Interval(_) => None,
            DirectedSet::Nested { grid, .. } => Some(grid),
        }
    }

    pub fn grid_spec(&self) -> GridSpec {
        match self {
            DirectedSet::Interval(_) => GridSpec::Line,
            DirectedSet::Nested { grid, .. } => grid.spec(),
        }
    }

    pub fn entries(&self) -> &[Entry] {
        match self {
            DirectedSet::Interval(_) => &[],
            DirectedSet::Nested { entries, .. } => entries,
        }
    }

    pub fn as_interval(&self) -> Option<&DirectedInterval> {
        match self {
            DirectedSet::Interval(d) => Some(d),
            DirectedSet::Nested { .. } => None,
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid_spec() != other.grid_spec() {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid_spec(), other.grid_spec())));
        }
        Ok(())
    }

    /// `αA + βB`, computed componentwise.
    pub fn linear_comb(alpha: f64, a: &Self, beta: f64, b: &Self) -> Result<Self> {
        a.check_compatible(b)?;
        Ok(Self::comb_unchecked(alpha, a, beta, b))
    }

    fn comb_unchecked(alpha: f64, a: &Self, beta: f64, b: &Self) -> Self {
        match (a, b) {
            (DirectedSet::Interval(x), DirectedSet::Interval(y)) => {
                DirectedSet::Interval(DirectedInterval::comb(alpha, x, beta, y))
            }
            (DirectedSet::Nested { grid, entries: ea }, DirectedSet::Nested { entries: eb, .. }) => {
                let entries = ea
                    .iter()
                    .zip(eb)
                    .map(|(p, q)| Entry {
                        lower: Self::comb_unchecked(alpha, &p.lower, beta, &q.lower),
                        support: alpha * p.support + beta * q.support,
                    })
                    .collect();
                DirectedSet::Nested { grid: grid.clone(), entries }
            }
            _ => unreachable!("compatibility checked by the caller"),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::linear_comb(1.0, self, 1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::linear_comb(1.0, self, -1.0, other)
    }

    pub fn scale(&self, lambda: f64) -> Self {
        self.map(&|v| lambda * v)
    }

    /// `-A`. Unlike the pointwise negation of a set, `A + (-A)` is zero.
    pub fn neg(&self) -> Self {
        self.map(&|v| -v)
    }

    fn map(&self, f: &dyn Fn(f64) -> f64) -> Self {
        match self {
            DirectedSet::Interval(d) => DirectedSet::interval(f(d.neg), f(d.pos)),
            DirectedSet::Nested { grid, entries } => DirectedSet::Nested {
                grid: grid.clone(),
                entries: entries
                    .iter()
                    .map(|e| Entry { lower: e.lower.map(f), support: f(e.support) })
                    .collect(),
            },
        }
    }

    /// Largest absolute value over all stored components.
    pub fn norm(&self) -> f64 {
        self.level_maxima().into_iter().fold(0.0, f64::max)
    }

    /// `levels[k - 1]` is the largest absolute component at dimension `k`;
    /// the last element belongs to the top-level supports.
    pub fn level_maxima(&self) -> Vec<f64> {
        let mut levels = vec![0.0; self.dim()];
        self.collect_levels(&mut levels);
        levels
    }

    fn collect_levels(&self, levels: &mut [f64]) {
        match self {
            DirectedSet::Interval(d) => levels[0] = levels[0].max(d.norm()),
            DirectedSet::Nested { grid, entries } => {
                let top = grid.dim() - 1;
                for e in entries {
                    levels[top] = levels[top].max(e.support.abs());
                    e.lower.collect_levels(levels);
                }
            }
        }
    }

    /// `‖A - B‖` together with where it is attained.
    pub fn compare(&self, other: &Self, tol: f64) -> Result<DsComparison> {
        self.check_compatible(other)?;
        let mut worst = (-1.0, Vec::new(), Component::Support);
        worst_component(self, other, &mut Vec::new(), &mut worst);
        Ok(DsComparison { discrepancy: worst.0, path: worst.1, component: worst.2, equal: worst.0 <= tol })
    }

    /// `‖A - B‖ ≤ tol`.
    pub fn equal(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(self.compare(other, tol)?.equal)
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string(self)
    }

    /// Parses a document written by [`DirectedSet::to_json`], regenerating
    /// each declared grid and checking every stored direction against it.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DsDoc = serde_json::from_str(text)?;
        let mut cache = HashMap::new();
        doc.build(&mut cache)
    }
}

type Worst = (f64, Vec<Vec<f64>>, Component);

fn worst_component(a: &DirectedSet, b: &DirectedSet, path: &mut Vec<Vec<f64>>, worst: &mut Worst) {
    match (a, b) {
        (DirectedSet::Interval(x), DirectedSet::Interval(y)) => {
            consider(worst, (x.neg - y.neg).abs(), path, Component::Neg);
            consider(worst, (x.pos - y.pos).abs(), path, Component::Pos);
        }
        (DirectedSet::Nested { grid, entries: ea }, DirectedSet::Nested { entries: eb, .. }) => {
            for (i, (p, q)) in ea.iter().zip(eb).enumerate() {
                path.push(grid.direction(i).to_vec());
                consider(worst, (p.support - q.support).abs(), path, Component::Support);
                worst_component(&p.lower, &q.lower, path, worst);
                path.pop();
            }
        }
        _ => unreachable!("compatibility checked by the caller"),
    }
}

fn consider(worst: &mut Worst, diff: f64, path: &[Vec<f64>], c: Component) {
    // NaN compares false everywhere; treat it as an infinite discrepancy.
    let diff = if diff.is_nan() { f64::INFINITY } else { diff };
    if diff > worst.0 {
        *worst = (diff, path.to_vec(), c);
    }
}

impl Serialize for DirectedSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DirectedSet::Interval(d) => {
                let mut st = s.serialize_struct("DirectedSet", 3)?;
                st.serialize_field("n", &1)?;
                st.serialize_field("neg", &d.neg)?;
                st.serialize_field("pos", &d.pos)?;
                st.end()
            }
            DirectedSet::Nested { grid, entries } => {
                #[derive(Serialize)]
                struct EntryOut<'a> {
                    l: &'a [f64],
                    support: f64,
                    lower: &'a DirectedSet,
                }
                let out: Vec<EntryOut> = entries
                    .iter()
                    .enumerate()
                    .map(|(i, e)| EntryOut { l: grid.direction(i), support: e.support, lower: &e.lower })
                    .collect();
                let mut st = s.serialize_struct("DirectedSet", 3)?;
                st.serialize_field("n", &grid.dim())?;
                st.serialize_field("grid", &grid.spec())?;
                st.serialize_field("entries", &out)?;
                st.end()
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DsDoc {
    n: usize,
    #[serde(default)]
    neg: Option<f64>,
    #[serde(default)]
    pos: Option<f64>,
    #[serde(default)]
    grid: Option<GridSpec>,
    #[serde(default)]
    entries: Option<Vec<EntryDoc>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    l: Vec<f64>,
    support: f64,
    lower: DsDoc,
}

impl DsDoc {
    fn build(self, cache: &mut HashMap<GridSpec, Arc<SphereGrid>>) -> Result<DirectedSet> {
        if self.n == 1 {
            return match (self.neg, self.pos, &self.grid, &self.entries) {
                (Some(neg), Some(pos), None, None) if neg.is_finite() && pos.is_finite() => {
                    Ok(DirectedSet::interval(neg, pos))
                }
                _ => Err(Error::Malformed("an n = 1 entry needs exactly \"neg\" and \"pos\"".into())),
            };
        }
        let (Some(spec), Some(entries), None, None) = (self.grid, self.entries, self.neg, self.pos) else {
            return Err(Error::Malformed(format!("an n = {} entry needs \"grid\" and \"entries\"", self.n)));
        };
        if spec.dim() != self.n {
            return Err(Error::GridMismatch(format!("declared n = {} but grid has n = {}", self.n, spec.dim())));
        }
        let grid = match cache.get(&spec) {
            Some(g) => g.clone(),
            None => {
                let g = SphereGrid::new(spec)?;
                cache.insert(spec, g.clone());
                g
            }
        };
        if entries.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} entries for a grid of {} directions",
                entries.len(),
                grid.len()
            )));
        }
        let mut built = Vec::with_capacity(entries.len());
        for (i, e) in entries.into_iter().enumerate() {
            if e.l.as_slice() != grid.direction(i) {
                return Err(Error::GridMismatch(format!(
                    "entry {i} has direction {:?}, grid has {:?}",
                    e.l,
                    grid.direction(i)
                )));
            }
            built.push(Entry { lower: e.lower.build(cache)?, support: e.support });
        }
        DirectedSet::nested(grid, built)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(grid: &Arc<SphereGrid>, seed: f64) -> DirectedSet {
        let sub = grid.sub_grid().unwrap().clone();
        let entries = (0..grid.len())
            .map(|i| {
                let t = seed + i as f64;
                Entry {
                    lower: if sub.dim() == 1 {
                        DirectedSet::interval((0.3 * t).sin(), (0.7 * t).cos())
                    } else {
                        sample(&sub, t)
                    },
                    support: (1.1 * t).sin() * 2.0,
                }
            })
            .collect();
        DirectedSet::nested(grid.clone(), entries).unwrap()
    }

    #[test]
    fn interval_examples() {
        assert_eq!(DirectedInterval::from_interval(1.0, 3.0).unwrap(), DirectedInterval::raw(-1.0, 3.0));
        assert_eq!(DirectedInterval::from_interval(0.0, 0.0).unwrap(), DirectedInterval::raw(0.0, 0.0));
        assert_eq!(DirectedInterval::from_interval(-2.0, 5.0).unwrap(), DirectedInterval::raw(2.0, 5.0));
        assert!(matches!(DirectedInterval::from_interval(2.0, 1.0), Err(Error::InvalidInterval { .. })));

        let a = DirectedSet::Interval(DirectedInterval::from_interval(1.0, 2.0).unwrap());
        let b = DirectedSet::Interval(DirectedInterval::from_interval(0.0, 3.0).unwrap());
        let c = DirectedSet::linear_comb(2.0, &a, -1.0, &b).unwrap();
        assert_eq!(c, DirectedSet::interval(-2.0, 1.0));
        assert!(c.as_interval().unwrap().is_inverted());
        assert_eq!(DirectedSet::interval(-1.0, 3.0).norm(), 3.0);
    }

    #[test]
    fn group_laws() {
        let grid = SphereGrid::circle(16).unwrap();
        let a = sample(&grid, 0.0);
        let b = sample(&grid, 5.5);
        assert_eq!(a.sub(&a).unwrap().norm(), 0.0);
        assert_eq!(a.sub(&a).unwrap(), DirectedSet::zero(&grid));
        let back = a.sub(&b).unwrap().add(&b).unwrap();
        assert!(back.compare(&a, 1e-15).unwrap().equal);
        assert_eq!(a.scale(1.0), a);
        assert_eq!(a.neg().add(&a).unwrap().norm(), 0.0);
        assert_eq!(a.scale(-3.0).norm(), 3.0 * a.norm());
    }

    #[test]
    fn comparison_report_locates_worst_component() {
        let grid = SphereGrid::circle(8).unwrap();
        let a = sample(&grid, 1.0);
        let mut b = a.clone();
        if let DirectedSet::Nested { entries, .. } = &mut b {
            if let DirectedSet::Interval(d) = &mut entries[3].lower {
                d.pos += 0.25;
            }
        }
        let r = a.compare(&b, 0.1).unwrap();
        assert!(!r.equal);
        assert_eq!(r.component, Component::Pos);
        assert_eq!(r.path, vec![grid.direction(3).to_vec()]);
        assert!((r.discrepancy - 0.25).abs() < 1e-15);

        let tol = 1e-3;
        let x = DirectedSet::interval(-1.0, 3.0);
        assert!(x.equal(&x, 0.0).unwrap());
        assert!(!x.equal(&DirectedSet::interval(-1.0, 3.0 + 2.0 * tol), tol).unwrap());
    }

    #[test]
    fn mixed_grids_are_rejected() {
        let a = sample(&SphereGrid::circle(8).unwrap(), 0.0);
        let b = sample(&SphereGrid::circle(16).unwrap(), 0.0);
        assert!(matches!(a.add(&b), Err(Error::GridMismatch(_))));
        assert!(matches!(a.add(&DirectedSet::interval(0.0, 0.0)), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn json_round_trip() {
        let x = DirectedSet::interval(0.1, -2.0 / 3.0);
        let text = x.to_json().unwrap();
        assert!(text.starts_with("{\"n\":1,\"neg\":"), "{text}");
        assert_eq!(DirectedSet::from_json(&text).unwrap(), x);

        let grid = SphereGrid::sphere(3, 8, 8).unwrap();
        let a = sample(&grid, 0.25);
        let back = DirectedSet::from_json(&a.to_json().unwrap()).unwrap();
        assert!(back.equal(&a, 0.0).unwrap());
        assert_eq!(back.norm(), a.norm());
    }

    #[test]
    fn json_rejects_bad_documents() {
        assert!(DirectedSet::from_json("{\"n\":1,\"neg\":1}").is_err());
        assert!(DirectedSet::from_json("not json").is_err());
        let grid = SphereGrid::circle(8).unwrap();
        let text = sample(&grid, 0.0).to_json().unwrap();
        let tampered = text.replacen("\"k\":8", "\"k\":16", 1);
        assert!(matches!(DirectedSet::from_json(&tampered), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn level_maxima_and_norm() {
        let grid = SphereGrid::circle(8).unwrap();
        let a = sample(&grid, 2.0);
        let levels = a.level_maxima();
        assert_eq!(levels.len(), 2);
        assert_eq!(a.norm(), levels[0].max(levels[1]));
    }
}
