//! Standard form of correlation blocks and the single-block GLUs that reach it.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::Mat2;
use crate::state::GluSet;
use crate::symplectic::IwasawaParams;
use crate::{Error, Result};

/// A correlation block of the form `[[0, δ], [δ, w]]`, `δ = √(−Det) ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardBlock {
    pub delta: f64,
    pub w: f64,
}

impl StandardBlock {
    pub fn matrix(&self) -> Mat2 {
        Mat2::new(0.0, self.delta, self.delta, self.w)
    }

    /// Reads a block that is already in standard form up to `tol` (relative to
    /// its size). The sign of the off-diagonal pair is dropped.
    pub fn from_matrix(m: &Mat2, tol: f64) -> Result<Self> {
        let scale = 1.0 + m.abs().max();
        if m[(0, 0)].abs() > tol * scale || (m[(0, 1)] - m[(1, 0)]).abs() > tol * scale {
            return Err(Error::InvalidParameter("block is not in standard form"));
        }
        let delta = 0.5 * (m[(0, 1)] + m[(1, 0)]);
        Ok(StandardBlock {
            delta: delta.abs(),
            w: m[(1, 1)],
        })
    }
}

/// `T_j = diag(λ_j^{−1/2}, λ_j^{1/2})`, which sets the `QQ` entry of a
/// diagonal-`U` state's `σ_jj = [[λ_j, 0], [0, ·]]` to one.
pub fn standardize_t(lambdas: &[f64]) -> Result<GluSet> {
    let blocks = lambdas
        .iter()
        .map(|&l| {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::InvalidParameter("λ must be positive and finite"));
            }
            let s = l.sqrt();
            Ok(Mat2::new(1.0 / s, 0.0, 0.0, s))
        })
        .collect::<Result<Vec<_>>>()?;
    GluSet::new(blocks)
}

fn delta_of(m: &Mat2) -> Result<f64> {
    let det = m.determinant();
    if !(det < 0.0) {
        return Err(Error::WrongBranch { det });
    }
    Ok((-det).sqrt())
}

/// GLU acting from the left, `S M = [[0, δ], [δ, δ(AB + CD)/(A² + C²)]]`.
pub fn left_standardize(m: &Mat2) -> Result<(IwasawaParams, StandardBlock)> {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let norm = a.hypot(c);
    if norm == 0.0 {
        return Err(Error::DegenerateColumn);
    }
    let delta = delta_of(m)?;
    let params = IwasawaParams {
        q: 0.0,
        r: norm / delta,
        phi: a.atan2(c),
    };
    Ok((
        params,
        StandardBlock {
            delta,
            w: delta * (a * b + c * d) / (norm * norm),
        },
    ))
}

/// GLU acting from the right, `M Sᵀ = [[0, δ], [δ, δ(AC + BD)/(A² + B²)]]`.
pub fn right_standardize(m: &Mat2) -> Result<(IwasawaParams, StandardBlock)> {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let norm = a.hypot(b);
    if norm == 0.0 {
        return Err(Error::DegenerateColumn);
    }
    let delta = delta_of(m)?;
    let params = IwasawaParams {
        q: 0.0,
        r: norm / delta,
        phi: a.atan2(b),
    };
    Ok((
        params,
        StandardBlock {
            delta,
            w: delta * (a * c + b * d) / (norm * norm),
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Outcome of aligning a singular block. Only rotations are fixed; squeezing
/// stays free (`r = 1`) until another block constrains it.
#[derive(Debug, Clone, PartialEq)]
pub enum SingularAlignment {
    /// The block vanishes and carries no information about either GLU.
    NoInformation,
    /// Candidate rotations, in the order they should be tried.
    Branches(Vec<IwasawaParams>),
}

/// Rotation-only alignment of a block with vanishing determinant.
///
/// Left: zeroes the top row of `R(φ) M` (using the first column when the
/// second one vanishes). Right: returns both solutions of `ab + cd = 0` for
/// `M R(φ)ᵀ`; the first zeroes the first column, the second zeroes the second
/// column (`φ + π/2`).
pub fn singular_align(m: &Mat2, side: Side) -> SingularAlignment {
    if m.iter().all(|x| *x == 0.0) {
        return SingularAlignment::NoInformation;
    }
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let rot = |phi: f64| IwasawaParams {
        q: 0.0,
        r: 1.0,
        phi,
    };
    match side {
        Side::Left => {
            let phi = if b.hypot(d) > 0.0 {
                b.atan2(d)
            } else {
                a.atan2(c)
            };
            SingularAlignment::Branches(alloc::vec![rot(phi)])
        }
        Side::Right => {
            // cos 2φ ∝ a² − b² + c² − d², sin 2φ ∝ −2(ab + cd); this root keeps
            // the second column orthogonal to the (parallel) first one, i.e. zero.
            let two_phi = (-2.0 * (a * b + c * d)).atan2(a * a - b * b + c * c - d * d);
            let keep_first = 0.5 * two_phi;
            let half_pi = core::f64::consts::FRAC_PI_2;
            SingularAlignment::Branches(alloc::vec![rot(keep_first + half_pi), rot(keep_first)])
        }
    }
}

/// `rotation(phi)` for the parameters returned by [`singular_align`].
#[cfg(test)]
pub(crate) fn alignment_matrix(p: &IwasawaParams) -> Mat2 {
    crate::linalg::rotation(p.phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::iwasawa_compose;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn compose(p: &IwasawaParams) -> Mat2 {
        iwasawa_compose(p).unwrap()
    }

    #[test]
    fn t_examples() {
        assert_eq!(standardize_t(&[1.0]).unwrap().blocks()[0], Mat2::identity());
        assert_eq!(
            standardize_t(&[4.0]).unwrap().blocks()[0],
            Mat2::new(0.5, 0.0, 0.0, 2.0)
        );
        assert!(standardize_t(&[0.0]).is_err());
        assert!(standardize_t(&[-1.0]).is_err());
    }

    #[test]
    fn t_standardizes_diagonal_u_cluster() {
        // two-mode graph state with diagonal U
        use crate::graph::{state_from_graph, ComplexGraph};
        use crate::MatrixN;
        let v = MatrixN::from_row_slice(2, 2, &[0.0, 0.8, 0.8, 0.0]);
        let u = MatrixN::from_row_slice(2, 2, &[0.3, 0.0, 0.0, 1.7]);
        let s = state_from_graph(&ComplexGraph::new(v, u, 1e-12).unwrap()).unwrap();
        let lambdas = [s.block(0, 0)[(0, 0)], s.block(1, 1)[(0, 0)]];
        let t = crate::state::apply_glus(&s, &standardize_t(&lambdas).unwrap()).unwrap();
        assert!((t.block(0, 0)[(0, 0)] - 1.0).abs() < 1e-12);
        let b = t.block(0, 1);
        let delta = (-s.block(0, 1).determinant()).sqrt();
        assert!(b[(0, 0)].abs() < 1e-12);
        assert!((b[(0, 1)].abs() - delta).abs() < 1e-12 && (b[(1, 0)] - b[(0, 1)]).abs() < 1e-12);
    }

    #[test]
    fn left_examples() {
        let (p, s) = left_standardize(&Mat2::new(0.0, 1.0, 1.0, 0.0)).unwrap();
        assert_eq!((p.phi, p.r), (0.0, 1.0));
        assert_eq!(s.matrix(), Mat2::new(0.0, 1.0, 1.0, 0.0));
        let m = Mat2::new(1.0, 0.0, 0.0, -1.0);
        let (p, s) = left_standardize(&m).unwrap();
        assert!((p.phi - PI / 2.0).abs() < 1e-15 && (p.r - 1.0).abs() < 1e-15);
        assert!(
            (compose(&p) * m - Mat2::new(0.0, 1.0, 1.0, 0.0))
                .abs()
                .max()
                < 1e-15
        );
        assert_eq!(s.delta, 1.0);
        assert!(matches!(
            left_standardize(&Mat2::identity()),
            Err(Error::WrongBranch { .. })
        ));
        assert!(matches!(
            left_standardize(&Mat2::new(0.0, 1.0, 0.0, 1.0)),
            Err(Error::DegenerateColumn)
        ));
    }

    #[test]
    fn right_examples() {
        let (p, _) = right_standardize(&Mat2::new(0.0, 1.0, 1.0, 0.0)).unwrap();
        assert_eq!((p.q, p.r, p.phi), (0.0, 1.0, 0.0));
        let m = Mat2::new(1.0, 0.0, 0.0, -1.0);
        let (p, s) = right_standardize(&m).unwrap();
        assert!((p.phi - PI / 2.0).abs() < 1e-15 && (p.r - 1.0).abs() < 1e-15);
        assert!((m * compose(&p).transpose() - s.matrix()).abs().max() < 1e-15);
        let (_, l) = left_standardize(&m).unwrap();
        assert_eq!(l.delta, s.delta);
    }

    #[test]
    fn singular_left_example() {
        let m = Mat2::new(1.0, 0.0, 0.0, 0.0);
        let SingularAlignment::Branches(b) = singular_align(&m, Side::Left) else {
            panic!()
        };
        assert!((b[0].phi.abs() - PI / 2.0).abs() < 1e-15);
        let out = alignment_matrix(&b[0]) * m;
        assert!(out[(0, 0)].abs() < 1e-12 && out[(0, 1)].abs() < 1e-12);
        assert_eq!(
            singular_align(&Mat2::zeros(), Side::Right),
            SingularAlignment::NoInformation
        );
    }

    #[test]
    fn singular_right_returns_both_column_branches() {
        let m = Mat2::new(0.3, 0.6, -0.2, -0.4);
        let SingularAlignment::Branches(b) = singular_align(&m, Side::Right) else {
            panic!()
        };
        assert_eq!(b.len(), 2);
        let first = m * alignment_matrix(&b[0]).transpose();
        let second = m * alignment_matrix(&b[1]).transpose();
        assert!(first.column(0).norm() < 1e-12);
        assert!(second.column(1).norm() < 1e-12);
    }

    fn arb_mat() -> impl Strategy<Value = Mat2> {
        proptest::array::uniform4(-2.0..2.0_f64).prop_map(|a| Mat2::new(a[0], a[1], a[2], a[3]))
    }

    proptest! {
        #[test]
        fn left_and_right_reach_standard_form(m in arb_mat()) {
            prop_assume!(m.determinant() < -1e-3);
            let (p, s) = left_standardize(&m).unwrap();
            let sl = compose(&p);
            prop_assert!((sl.determinant() - 1.0).abs() < 1e-10);
            let out = sl * m;
            prop_assert!(out[(0, 0)].abs() < 1e-12 * (1.0 + m.abs().max()) * p.r);
            prop_assert!((out - s.matrix()).abs().max() < 1e-9 * (1.0 + p.r + 1.0 / p.r));
            let (p, s) = right_standardize(&m).unwrap();
            let out = m * compose(&p).transpose();
            prop_assert!((out - s.matrix()).abs().max() < 1e-9 * (1.0 + p.r + 1.0 / p.r));
        }

        #[test]
        fn rank_one_blocks_align_to_corner(x in proptest::array::uniform2(-2.0..2.0_f64),
                                           y in proptest::array::uniform2(-2.0..2.0_f64)) {
            let a = nalgebra::Vector2::new(x[0], x[1]);
            let b = nalgebra::Vector2::new(y[0], y[1]);
            prop_assume!(a.norm() > 1e-2 && b.norm() > 1e-2);
            let m = a * b.transpose();
            let SingularAlignment::Branches(right) = singular_align(&m, Side::Right) else { panic!() };
            let m1 = m * alignment_matrix(&right[0]).transpose();
            let SingularAlignment::Branches(left) = singular_align(&m1, Side::Left) else { panic!() };
            let out = alignment_matrix(&left[0]) * m1;
            let scale = m.abs().max();
            prop_assert!(out[(0, 0)].abs() < 1e-12 * scale);
            prop_assert!(out[(0, 1)].abs() < 1e-12 * scale);
            prop_assert!(out[(1, 0)].abs() < 1e-12 * scale);
            prop_assert!(out[(1, 1)].abs() > 0.5 * a.norm() * b.norm());
        }
    }
}
