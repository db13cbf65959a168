use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

/// Tolerance on `‖l‖ - 1` accepted for direction vectors.
pub const UNIT_TOL: f64 = 1e-9;

/// The fixed rotation `R_{n,l}` attached to a unit direction `l`.
///
/// `R l = e^n`, so `R` maps `span{l}^⊥` onto the first `n - 1` coordinate
/// axes. The choice is a pure function of the bits of `l`:
///
/// * `n = 1`: `R = [l]`;
/// * `n = 2`: `R = [[l2, -l1], [l1, l2]]`;
/// * `n = 3`: the rotation about the axis `l × e³` by the angle between `l`
///   and `e³`, with `R = I` at `l = e³` and `R = diag(1, -1, -1)` at
///   `l = -e³`. No continuous choice exists on all of S², so this one is
///   discontinuous at the south pole only.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    n: usize,
    m: [[f64; 3]; 3],
}

impl Rotation {
    pub fn for_direction(l: &[f64]) -> Result<Self> {
        let n = l.len();
        let len = norm(l);
        if !(len - 1.0).abs().le(&UNIT_TOL) {
            return Err(Error::NonUnitDirection { norm: len });
        }
        let mut m = [[0.0; 3]; 3];
        match n {
            1 => m[0][0] = l[0],
            2 => {
                m[0] = [l[1], -l[0], 0.0];
                m[1] = [l[0], l[1], 0.0];
            }
            3 => m = rotation3(l),
            _ => return Err(Error::UnsupportedDimension(n)),
        }
        Ok(Self { n, m })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Row `i` of the matrix.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.m[i][..self.n]
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// `R x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Rᵀ x = R⁻¹ x`.
    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).fold(0.0, |acc, i| acc + self.m[i][j] * x[i]))
            .collect()
    }

    /// `Π_{n-1,l} x`: rotate, then drop the last coordinate.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n - 1).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Πᵀ_{n-1,l} y = R⁻¹ (y, 0)`.
    pub fn lift(&self, y: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n - 1).fold(0.0, |acc, i| acc + self.m[i][j] * y[i]))
            .collect()
    }

    /// The `n × (n-1)` matrix of [`Rotation::lift`], i.e. `Πᵀ_{n-1,l}`.
    ///
    /// Its transpose applied to `c` sums in the same order as
    /// [`Rotation::project`], so both produce bit-identical results.
    pub fn lift_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n - 1).map(|j| self.m[j][i]).collect())
            .collect()
    }
}

fn rotation3(l: &[f64]) -> [[f64; 3]; 3] {
    let (l1, l2, l3) = (l[0], l[1], l[2]);
    if l1 == 0.0 && l2 == 0.0 {
        return if l3 > 0.0 {
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        } else {
            [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]
        };
    }
    // v = l × e³, c = ⟨l, e³⟩; R = I + [v]× + [v]×² / (1 + c).
    let v = [l2, -l1, 0.0];
    let k = [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]];
    // 1 / (1 + c) loses all precision near the south pole; there the
    // equivalent (1 - c) / (l1² + l2²) does not.
    let w = if l3 >= 0.0 { 1.0 / (1.0 + l3) } else { (1.0 - l3) / (l1 * l1 + l2 * l2) };
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let k2 = (0..3).fold(0.0, |acc, t| acc + k[i][t] * k[t][j]);
            r[i][j] = if i == j { 1.0 } else { 0.0 } + k[i][j] + k2 * w;
        }
    }
    r
}

/// `R_{n,l}` for a unit vector `l` (`n ∈ {1, 2, 3}`).
pub fn rotation(l: &[f64]) -> Result<Rotation> {
    Rotation::for_direction(l)
}

/// `Π_{n-1,l} x`.
pub fn project(l: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != l.len() {
        return Err(Error::DimensionMismatch { expected: l.len(), found: x.len() });
    }
    Ok(rotation(l)?.project(x))
}

/// `Πᵀ_{n-1,l} y`, a right inverse of [`project`] on `span{l}^⊥`.
pub fn lift(l: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if y.len() + 1 != l.len() {
        return Err(Error::DimensionMismatch { expected: l.len() - 1, found: y.len() });
    }
    Ok(rotation(l)?.lift(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    fn det3(m: &[Vec<f64>]) -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    #[test]
    fn planar_rotation_matches_closed_form() {
        assert_eq!(rotation(&[0.0, 1.0]).unwrap().matrix(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(rotation(&[1.0, 0.0]).unwrap().matrix(), vec![vec![0.0, -1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn poles_follow_convention() {
        let id = rotation(&[0.0, 0.0, 1.0]).unwrap().matrix();
        assert_eq!(id, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let south = rotation(&[0.0, 0.0, -1.0]).unwrap().matrix();
        assert_eq!(south, vec![vec![1.0, 0.0, 0.0], vec![0.0, -1.0, 0.0], vec![0.0, 0.0, -1.0]]);
    }

    #[test]
    fn rotation3_sends_direction_to_last_axis() {
        let dirs = [
            [0.6, 0.0, 0.8],
            [0.0, -0.6, -0.8],
            [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0],
            [1e-7, 0.0, -(1.0f64 - 1e-14).sqrt()],
        ];
        for l in dirs {
            let r = rotation(&l).unwrap();
            assert_close(&r.apply(&l), &[0.0, 0.0, 1.0], 1e-12);
            let m = r.matrix();
            for i in 0..3 {
                for j in 0..3 {
                    let g: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                    assert!((g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
                }
            }
            assert!((det3(&m) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_examples() {
        let l = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
        assert_close(&project(&l, &[1.0, 0.0]).unwrap(), &[FRAC_1_SQRT_2], 1e-15);
        assert_close(&project(&l, &l).unwrap(), &[0.0], 1e-15);
        assert_eq!(project(&[0.0, 1.0], &[3.0, -4.0]).unwrap(), vec![3.0]);
    }

    #[test]
    fn lift_examples() {
        let l = [0.6, 0.8];
        let y = 2.5;
        assert_close(&lift(&l, &[y]).unwrap(), &[y * l[1], -y * l[0]], 1e-15);
        assert_eq!(lift(&l, &[0.0]).unwrap(), vec![0.0, 0.0]);
        let l3 = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
        let y3 = [0.3, -1.7];
        assert_close(&project(&l3, &lift(&l3, &y3).unwrap()).unwrap(), &y3, 1e-14);
    }

    #[test]
    fn lift_matrix_is_transpose_of_projection() {
        let r = rotation(&[1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0]).unwrap();
        let a = r.lift_matrix();
        let c = [0.7, -1.3, 2.9];
        let via_matrix: Vec<f64> =
            (0..2).map(|j| (0..3).fold(0.0, |acc, i| acc + a[i][j] * c[i])).collect();
        assert_eq!(via_matrix, r.project(&c));
    }

    #[test]
    fn rejects_non_unit_and_bad_dimensions() {
        assert!(matches!(rotation(&[1.0, 1.0]), Err(Error::NonUnitDirection { .. })));
        assert!(matches!(rotation(&[0.5, 0.5, 0.5, 0.5]), Err(Error::UnsupportedDimension(4))));
        assert!(project(&[1.0, 0.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(lift(&[1.0, 0.0], &[1.0, 2.0]).is_err());
    }
}
