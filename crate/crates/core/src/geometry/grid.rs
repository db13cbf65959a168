use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::rotation::Rotation;
use crate::error::{Error, Result};

/// Default number of directions on S¹.
pub const DEFAULT_CIRCLE_K: usize = 360;
/// Default latitude rings on S² (poles excluded).
pub const DEFAULT_POLAR: usize = 45;
/// Default directions per latitude ring on S².
pub const DEFAULT_AZIMUTH: usize = 90;

/// Resolution description of a [`SphereGrid`]; it determines the grid
/// completely, so two grids are interchangeable iff their specs are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GridSpecDoc", into = "GridSpecDoc")]
pub enum GridSpec {
    /// S⁰ = {-1, +1}.
    Line,
    /// `k` equally spaced angles `2πj/k` on S¹; `8 | k`.
    Circle { k: usize },
    /// Both poles plus `polar` latitude rings of `azimuth` directions on S²;
    /// faces are resolved on a circle grid with `sub_k` directions.
    Sphere { polar: usize, azimuth: usize, sub_k: usize },
}

impl GridSpec {
    pub fn dim(&self) -> usize {
        match self {
            GridSpec::Line => 1,
            GridSpec::Circle { .. } => 2,
            GridSpec::Sphere { .. } => 3,
        }
    }

    /// The spec of the grid used one dimension down.
    pub fn sub(&self) -> Option<GridSpec> {
        match *self {
            GridSpec::Line => None,
            GridSpec::Circle { .. } => Some(GridSpec::Line),
            GridSpec::Sphere { sub_k, .. } => Some(GridSpec::Circle { k: sub_k }),
        }
    }

    /// Grid for dimension `n`: `k` directions on S¹ (also the face grid
    /// when `n = 3`), `grid3 = (polar, azimuth)` rings on S².
    pub fn for_dimension(n: usize, k: usize, grid3: Option<(usize, usize)>) -> Result<GridSpec> {
        let spec = match n {
            1 => GridSpec::Line,
            2 => GridSpec::Circle { k },
            3 => {
                let (polar, azimuth) = grid3.unwrap_or((DEFAULT_POLAR, DEFAULT_AZIMUTH));
                GridSpec::Sphere { polar, azimuth, sub_k: k }
            }
            _ => return Err(Error::UnsupportedDimension(n)),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GridSpec::Line => Ok(()),
            GridSpec::Circle { k } => {
                if k == 0 || k % 8 != 0 {
                    return Err(Error::Resolution(format!(
                        "circle resolution {k} must be a positive multiple of 8"
                    )));
                }
                Ok(())
            }
            GridSpec::Sphere { polar, azimuth, sub_k } => {
                if polar == 0 || azimuth < 3 {
                    return Err(Error::Resolution(format!(
                        "sphere resolution ({polar}, {azimuth}) needs at least 1 ring and 3 azimuths"
                    )));
                }
                GridSpec::Circle { k: sub_k }.validate()
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GridSpecDoc {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    polar: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    azimuth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sub: Option<Box<GridSpecDoc>>,
}

impl From<GridSpec> for GridSpecDoc {
    fn from(spec: GridSpec) -> Self {
        let empty = GridSpecDoc { n: spec.dim(), k: None, polar: None, azimuth: None, sub: None };
        match spec {
            GridSpec::Line => empty,
            GridSpec::Circle { k } => GridSpecDoc { k: Some(k), ..empty },
            GridSpec::Sphere { polar, azimuth, sub_k } => GridSpecDoc {
                polar: Some(polar),
                azimuth: Some(azimuth),
                sub: Some(Box::new(GridSpec::Circle { k: sub_k }.into())),
                ..empty
            },
        }
    }
}

impl TryFrom<GridSpecDoc> for GridSpec {
    type Error = Error;

    fn try_from(doc: GridSpecDoc) -> Result<Self> {
        let missing = |what: &str| Error::Malformed(format!("grid of dimension {} lacks `{what}`", doc.n));
        let spec = match doc.n {
            1 => GridSpec::Line,
            2 => GridSpec::Circle { k: doc.k.ok_or_else(|| missing("k"))? },
            3 => {
                let sub = doc.sub.ok_or_else(|| missing("sub"))?;
                let sub_k = match GridSpec::try_from(*sub)? {
                    GridSpec::Circle { k } => k,
                    other => {
                        return Err(Error::Malformed(format!(
                            "sub-grid of a sphere grid must be a circle grid, got dimension {}",
                            other.dim()
                        )))
                    }
                };
                GridSpec::Sphere {
                    polar: doc.polar.ok_or_else(|| missing("polar"))?,
                    azimuth: doc.azimuth.ok_or_else(|| missing("azimuth"))?,
                    sub_k,
                }
            }
            n => return Err(Error::UnsupportedDimension(n)),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// A deterministic sampling of the unit sphere `S^{n-1}`, `n ∈ {1, 2, 3}`.
///
/// For `n ≥ 2` every direction carries its rotation `R_{n,l}`, and the grid
/// holds the grid used for the `(n-1)`-dimensional recursion.
#[derive(Debug)]
pub struct SphereGrid {
    spec: GridSpec,
    directions: Vec<Vec<f64>>,
    rotations: Vec<Rotation>,
    sub_grid: Option<Arc<SphereGrid>>,
    adjacency: Vec<(usize, usize)>,
    spacing: f64,
}

/// Grids are equal when they were built from the same description.
impl PartialEq for SphereGrid {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl SphereGrid {
    pub fn new(spec: GridSpec) -> Result<Arc<SphereGrid>> {
        spec.validate()?;
        let (directions, adjacency, spacing) = match spec {
            GridSpec::Line => (vec![vec![-1.0], vec![1.0]], vec![], PI),
            GridSpec::Circle { k } => circle(k),
            GridSpec::Sphere { polar, azimuth, .. } => sphere(polar, azimuth),
        };
        let rotations = if spec.dim() >= 2 {
            directions.iter().map(|l| Rotation::for_direction(l)).collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        let sub_grid = spec.sub().map(SphereGrid::new).transpose()?;
        Ok(Arc::new(SphereGrid { spec, directions, rotations, sub_grid, adjacency, spacing }))
    }

    pub fn line() -> Arc<SphereGrid> {
        SphereGrid::new(GridSpec::Line).expect("S⁰ grid is always valid")
    }

    pub fn circle(k: usize) -> Result<Arc<SphereGrid>> {
        SphereGrid::new(GridSpec::Circle { k })
    }

    pub fn sphere(polar: usize, azimuth: usize, sub_k: usize) -> Result<Arc<SphereGrid>> {
        SphereGrid::new(GridSpec::Sphere { polar, azimuth, sub_k })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.directions[i]
    }

    /// `R_{n,l}` for the `i`-th direction (`n ≥ 2` only).
    pub fn rotation(&self, i: usize) -> &Rotation {
        &self.rotations[i]
    }

    pub fn sub_grid(&self) -> Option<&Arc<SphereGrid>> {
        self.sub_grid.as_ref()
    }

    /// Index of the direction equal to `l` within `tol` (max-norm).
    pub fn find(&self, l: &[f64], tol: f64) -> Option<usize> {
        self.directions
            .iter()
            .position(|d| d.len() == l.len() && d.iter().zip(l).all(|(a, b)| (a - b).abs() <= tol))
    }

    /// Pairs of neighbouring directions.
    pub fn adjacency(&self) -> &[(usize, usize)] {
        &self.adjacency
    }

    /// Largest angular step between neighbouring directions.
    pub fn angular_spacing(&self) -> f64 {
        self.spacing
    }
}

// Unit vectors at the angles πm/4, written out so that ties such as
// |l1| = |l2| on the diagonals hold exactly.
const EIGHTHS: [[f64; 2]; 8] = [
    [1.0, 0.0],
    [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
    [0.0, 1.0],
    [-FRAC_1_SQRT_2, FRAC_1_SQRT_2],
    [-1.0, 0.0],
    [-FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    [0.0, -1.0],
    [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
];

/// The angle of the `j`-th direction of a `k`-direction circle grid.
pub fn circle_angle(j: usize, k: usize) -> f64 {
    TAU * j as f64 / k as f64
}

fn circle(k: usize) -> (Vec<Vec<f64>>, Vec<(usize, usize)>, f64) {
    let directions = (0..k)
        .map(|j| {
            if (8 * j) % k == 0 {
                EIGHTHS[8 * j / k].to_vec()
            } else {
                let theta = circle_angle(j, k);
                vec![theta.cos(), theta.sin()]
            }
        })
        .collect();
    let adjacency = (0..k).map(|j| (j, (j + 1) % k)).collect();
    (directions, adjacency, TAU / k as f64)
}

fn sphere(polar: usize, azimuth: usize) -> (Vec<Vec<f64>>, Vec<(usize, usize)>, f64) {
    let mut directions = Vec::with_capacity(polar * azimuth + 2);
    directions.push(vec![0.0, 0.0, 1.0]);
    for i in 1..=polar {
        let theta = PI * i as f64 / (polar + 1) as f64;
        let (st, ct) = theta.sin_cos();
        for j in 0..azimuth {
            let phi = TAU * j as f64 / azimuth as f64;
            let (sp, cp) = phi.sin_cos();
            directions.push(vec![st * cp, st * sp, ct]);
        }
    }
    directions.push(vec![0.0, 0.0, -1.0]);

    let ring = |i: usize, j: usize| 1 + (i - 1) * azimuth + j;
    let south = directions.len() - 1;
    let mut adjacency = Vec::new();
    for i in 1..=polar {
        for j in 0..azimuth {
            adjacency.push((ring(i, j), ring(i, (j + 1) % azimuth)));
            if i < polar {
                adjacency.push((ring(i, j), ring(i + 1, j)));
            }
        }
    }
    for j in 0..azimuth {
        adjacency.push((0, ring(1, j)));
        adjacency.push((ring(polar, j), south));
    }
    let spacing = (PI / (polar + 1) as f64).max(TAU / azimuth as f64);
    (directions, adjacency, spacing)
}

/// `S^{n-1}` sampled at resolution `k` (`n ≤ 2`) or at the default sphere
/// resolution with `k` face directions (`n = 3`).
pub fn make_sphere_grid(n: usize, k: usize) -> Result<Arc<SphereGrid>> {
    SphereGrid::new(GridSpec::for_dimension(n, k, None)?)
}
