//! The directed subdifferential computed from directional derivatives alone,
//! its norm certificate, and cross-checks against the embedding routes.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::directed_set::{DirectedSet, DsComparison, Entry};
use crate::embedding::{dc_directed_subdifferential, qd_directed_subdifferential};
use crate::error::{Error, Result};
use crate::expr::{convex_polyhedral_subdifferential, dd_function, substitute_affine, Expr};
use crate::geometry::{Polytope, Rotation, SphereGrid};

/// Factor in the continuity flag threshold `factor · spacing · max(1, M)`.
pub const CONTINUITY_FACTOR: f64 = 10.0;

/// Number of random samples used by the input consistency checks.
const SPOT_CHECKS: usize = 100;
const SPOT_TOL: f64 = 1e-9;
const SPOT_SEED: u64 = 0x5eed_d15c;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Derivative,
    Dc,
    Qd,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Derivative => "derivative",
            Route::Dc => "dc",
            Route::Qd => "qd",
        })
    }
}

/// Evidence that the function is `M`-directed subdifferentiable at the
/// point, read off a computed value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCertificate {
    /// Norm of the directed subdifferential, the smallest admissible `M`.
    #[serde(rename = "M")]
    pub m: f64,
    /// Largest absolute component per dimension, from 1 up to `n`.
    pub levels: Vec<f64>,
    /// Largest change of `f'(x; ·)` between neighbouring grid directions.
    pub continuity_max_jump: f64,
    pub continuity_threshold: f64,
    /// Set when the jump exceeds the threshold, which suggests that
    /// `f'(x; ·)` is discontinuous.
    pub continuity_flagged: bool,
}

#[derive(Debug, Clone)]
pub struct DirSubResult {
    pub value: DirectedSet,
    pub certificate: MCertificate,
    pub route: Route,
}

/// Builds the certificate of a computed directed subdifferential.
pub fn certificate_of(value: &DirectedSet) -> MCertificate {
    let levels = value.level_maxima();
    let m = levels.iter().copied().fold(0.0, f64::max);
    let (jump, spacing) = match value {
        DirectedSet::Interval(d) => ((d.pos + d.neg).abs(), std::f64::consts::PI),
        DirectedSet::Nested { grid, entries } => {
            let jump = grid
                .adjacency()
                .iter()
                .map(|&(i, j)| (entries[i].support - entries[j].support).abs())
                .fold(0.0, f64::max);
            (jump, grid.angular_spacing())
        }
    };
    let threshold = CONTINUITY_FACTOR * spacing * m.max(1.0);
    MCertificate {
        m,
        levels,
        continuity_max_jump: jump,
        continuity_threshold: threshold,
        continuity_flagged: jump > threshold,
    }
}

/// `φ_l(y) = φ(l + Πᵀ_l y)`, the restriction of a directional-derivative
/// expression to the tangent plane at `l`.
pub fn restrict(phi: &Expr, l: &[f64]) -> Result<Expr> {
    if phi.arity() != l.len() {
        return Err(Error::DimensionMismatch { expected: phi.arity(), found: l.len() });
    }
    if l.len() < 2 {
        return Err(Error::UnsupportedDimension(l.len() - 1));
    }
    restrict_with(phi, l, &Rotation::for_direction(l)?)
}

fn restrict_with(phi: &Expr, l: &[f64], rot: &Rotation) -> Result<Expr> {
    substitute_affine(phi, &rot.lift_matrix(), l)
}

fn derivative_value(f: &Expr, x: &[f64], grid: &Arc<SphereGrid>) -> Result<DirectedSet> {
    let phi = dd_function(f, x)?;
    let Some(sub) = grid.sub_grid() else {
        return Ok(DirectedSet::interval(phi.eval(&[-1.0])?, phi.eval(&[1.0])?));
    };
    let origin = vec![0.0; grid.dim() - 1];
    let entries = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let l = grid.direction(i);
            let support = phi.eval(l)?;
            let restricted = restrict_with(&phi, l, grid.rotation(i))?;
            let lower = derivative_value(&restricted, &origin, sub)?;
            Ok(Entry { lower, support })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DirectedSet::Nested { grid: grid.clone(), entries })
}

fn check_inputs(f: &Expr, x: &[f64], grid: &SphereGrid) -> Result<()> {
    if f.arity() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: f.arity() });
    }
    f.check_point(x)
}

/// The directed subdifferential of `f` at `x` from directional derivatives.
///
/// In one dimension the value is `[-f'(x; -1), f'(x; 1)]`. Above that, each
/// grid direction `l` stores `f'(x; l)` and, one dimension down, the
/// directed subdifferential of the restriction of `f'(x; ·)` around `l`,
/// taken at the origin.
pub fn directed_subdifferential(f: &Expr, x: &[f64], grid: &Arc<SphereGrid>) -> Result<DirSubResult> {
    check_inputs(f, x, grid)?;
    let value = derivative_value(f, x, grid)?;
    let certificate = certificate_of(&value);
    Ok(DirSubResult { value, certificate, route: Route::Derivative })
}

/// The certificate alone; `M` equals the norm of the directed
/// subdifferential.
pub fn certify(f: &Expr, x: &[f64], grid: &Arc<SphereGrid>) -> Result<MCertificate> {
    Ok(directed_subdifferential(f, x, grid)?.certificate)
}

/// Descriptions of the same function at the same point. At least two must
/// be present for a comparison.
#[derive(Debug, Clone, Default)]
pub struct RouteInputs {
    pub f: Option<Expr>,
    /// `f = g - h` with `g`, `h` convex piecewise affine.
    pub dc: Option<(Expr, Expr)>,
    /// Sub- and superdifferential of `f` at the point.
    pub qd: Option<(Polytope, Polytope)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RouteComparison {
    pub routes: [Route; 2],
    #[serde(flatten)]
    pub report: DsComparison,
}

#[derive(Debug, Clone, Serialize)]
pub struct RouteReport {
    pub pass: bool,
    pub tol: f64,
    pub comparisons: Vec<RouteComparison>,
    #[serde(skip)]
    pub results: Vec<DirSubResult>,
}

fn random_point(rng: &mut ChaCha8Rng, center: &[f64]) -> Vec<f64> {
    center.iter().map(|c| c + rng.gen_range(-1.0..1.0)).collect()
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if len > 1e-3 && len <= 1.0 {
            return v.into_iter().map(|a| a / len).collect();
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= SPOT_TOL * a.abs().max(b.abs()).max(1.0)
}

/// `f'(x; l)` as predicted by a quasidifferential.
fn qd_derivative(lower: &Polytope, upper: &Polytope, l: &[f64]) -> f64 {
    lower.support(l) - upper.negated().support(l)
}

type DirectionalDerivative<'a> = Box<dyn Fn(&[f64]) -> Result<f64> + 'a>;

fn check_consistency(inputs: &RouteInputs, x: &[f64]) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(SPOT_SEED);
    let n = x.len();
    if let (Some(f), Some((g, h))) = (&inputs.f, &inputs.dc) {
        for _ in 0..SPOT_CHECKS {
            let y = random_point(&mut rng, x);
            let (fy, gy, hy) = (f.eval(&y)?, g.eval(&y)?, h.eval(&y)?);
            if !close(fy, gy - hy) {
                return Err(Error::Inconsistent(format!("f = {fy} but g - h = {} at {y:?}", gy - hy)));
            }
        }
    }
    if let Some((lower, upper)) = &inputs.qd {
        let reference: Option<DirectionalDerivative> = match (&inputs.f, &inputs.dc) {
            (Some(f), _) => Some(Box::new(move |l| crate::expr::dini_dd(f, x, l))),
            (None, Some((g, h))) => {
                let dg = convex_polyhedral_subdifferential(g, x)?;
                let dh = convex_polyhedral_subdifferential(h, x)?;
                Some(Box::new(move |l| Ok(dg.support(l) - dh.support(l))))
            }
            (None, None) => None,
        };
        if let Some(reference) = reference {
            for _ in 0..SPOT_CHECKS {
                let l = random_direction(&mut rng, n);
                let (want, got) = (reference(&l)?, qd_derivative(lower, upper, &l));
                if !close(want, got) {
                    return Err(Error::Inconsistent(format!(
                        "directional derivative {want} but quasidifferential gives {got} along {l:?}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Computes every route the inputs allow and compares each pair.
///
/// When a DC pair is given without a quasidifferential, the pair
/// `(∂g(x), ⊖∂h(x))` is used for the quasidifferential route. Inputs are
/// first spot-checked against each other at random points (for `f` and
/// `g - h`) or random directions (for the quasidifferential).
pub fn compare_routes(inputs: &RouteInputs, x: &[f64], grid: &Arc<SphereGrid>, tol: f64) -> Result<RouteReport> {
    let n = grid.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    for e in inputs.f.iter().chain(inputs.dc.iter().flat_map(|(g, h)| [g, h])) {
        check_inputs(e, x, grid)?;
    }
    if let Some((lower, upper)) = &inputs.qd {
        for p in [lower, upper] {
            if p.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
            }
        }
    }
    let routes = [inputs.f.is_some(), inputs.dc.is_some(), inputs.qd.is_some() || inputs.dc.is_some()];
    if routes.iter().filter(|&&b| b).count() < 2 {
        return Err(Error::Inconsistent("at least two descriptions of the function are needed".into()));
    }
    check_consistency(inputs, x)?;

    let mut results = Vec::new();
    if let Some(f) = &inputs.f {
        results.push(directed_subdifferential(f, x, grid)?);
    }
    let wrap = |value: DirectedSet, route| DirSubResult { certificate: certificate_of(&value), value, route };
    if let Some((g, h)) = &inputs.dc {
        results.push(wrap(dc_directed_subdifferential(g, h, x, grid)?, Route::Dc));
    }
    match (&inputs.qd, &inputs.dc) {
        (Some((lower, upper)), _) => {
            results.push(wrap(qd_directed_subdifferential(lower, upper, grid)?, Route::Qd));
        }
        (None, Some((g, h))) => {
            let lower = convex_polyhedral_subdifferential(g, x)?;
            let upper = convex_polyhedral_subdifferential(h, x)?.negated();
            results.push(wrap(qd_directed_subdifferential(&lower, &upper, grid)?, Route::Qd));
        }
        (None, None) => {}
    }

    let mut comparisons = Vec::new();
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            let report = results[i].value.compare(&results[j].value, tol)?;
            comparisons.push(RouteComparison { routes: [results[i].route, results[j].route], report });
        }
    }
    let pass = comparisons.iter().all(|c| c.report.equal);
    Ok(RouteReport { pass, tol, comparisons, results })
}
