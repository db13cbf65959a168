//! Sphere sampling, the rotation family `R_{n,l}`, projections `Π_{n-1,l}`
//! and polytope support machinery.

mod grid;
mod polytope;
mod rotation;

pub use grid::{
    circle_angle, make_sphere_grid, GridSpec, SphereGrid, DEFAULT_AZIMUTH, DEFAULT_CIRCLE_K,
    DEFAULT_POLAR,
};
pub use polytope::{support_function, supporting_face, Polytope, EXTREME_TOL, FACE_TOL};
pub use rotation::{lift, project, rotation, Rotation, UNIT_TOL};
