use std::f64::consts::FRAC_1_SQRT_2;

use dirsub_core::embedding::{dc_directed_subdifferential, embed};
use dirsub_core::engine::directed_subdifferential;
use dirsub_core::expr::{convex_polyhedral_subdifferential, parse};
use dirsub_core::geometry::Polytope;
use dirsub_core::{DirectedSet, Expr, GridSpec, SphereGrid};

fn max_norm() -> Expr {
    parse("max(abs(x1), abs(x2))", 2).unwrap()
}

#[test]
fn derivative_and_embedding_routes_coincide_for_the_max_norm() {
    let grid = SphereGrid::circle(360).unwrap();
    let x = [0.0, 0.0];
    let derivative = directed_subdifferential(&max_norm(), &x, &grid).unwrap().value;
    let dc = dc_directed_subdifferential(&max_norm(), &Expr::constant(2, 0.0), &x, &grid).unwrap();
    let report = derivative.compare(&dc, 1e-10).unwrap();
    assert!(report.equal, "{report:?}");

    let diamond = convex_polyhedral_subdifferential(&max_norm(), &x).unwrap();
    assert_eq!(diamond.vertices().len(), 4);
    assert!(embed(&diamond, &grid).unwrap().equal(&dc, 0.0).unwrap());
    assert_eq!(dc.norm(), 1.0);
}

#[test]
fn max_norm_result_survives_a_json_round_trip() {
    let grid = SphereGrid::circle(360).unwrap();
    let value = directed_subdifferential(&max_norm(), &[0.0, 0.0], &grid).unwrap().value;
    let text = value.to_json().unwrap();
    let back = DirectedSet::from_json(&text).unwrap();
    assert!(back.equal(&value, 0.0).unwrap());
    assert_eq!(back.norm(), value.norm());
    assert_eq!(back.to_json().unwrap(), text);
}

#[test]
fn diagonal_entry_is_the_symmetric_interval() {
    let grid = SphereGrid::circle(360).unwrap();
    let value = directed_subdifferential(&max_norm(), &[0.0, 0.0], &grid).unwrap().value;
    for l in [[FRAC_1_SQRT_2, FRAC_1_SQRT_2], [-FRAC_1_SQRT_2, FRAC_1_SQRT_2], [FRAC_1_SQRT_2, -FRAC_1_SQRT_2]] {
        let e = &value.entries()[grid.find(&l, 0.0).unwrap()];
        let d = e.lower.as_interval().unwrap();
        assert!((d.lo() + FRAC_1_SQRT_2).abs() <= 1e-15, "{l:?}: {d}");
        assert!((d.hi() - FRAC_1_SQRT_2).abs() <= 1e-15, "{l:?}: {d}");
        assert_eq!(e.support, FRAC_1_SQRT_2);
    }
}

#[test]
fn three_dimensional_max_norm_matches_the_cube_embedding() {
    let grid = SphereGrid::new(GridSpec::Sphere { polar: 9, azimuth: 16, sub_k: 16 }).unwrap();
    let f = parse("max(abs(x1), abs(x2), abs(x3))", 3).unwrap();
    let x = [0.0; 3];
    let derivative = directed_subdifferential(&f, &x, &grid).unwrap();
    let octahedron = Polytope::new(vec![
        vec![1.0, 0.0, 0.0],
        vec![-1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, -1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, 0.0, -1.0],
    ])
    .unwrap();
    let embedded = embed(&octahedron, &grid).unwrap();
    assert!(derivative.value.equal(&embedded, 1e-12).unwrap());
    assert_eq!(derivative.certificate.m, 1.0);
    assert_eq!(derivative.certificate.levels.len(), 3);
    assert!(!derivative.certificate.continuity_flagged);
}
