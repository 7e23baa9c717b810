//! Small dense helpers shared by the other modules.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};

use crate::{Error, Result};

/// Dense real matrix of arbitrary size.
pub type MatrixN = DMatrix<f64>;
/// 2×2 single-mode block.
pub type Mat2 = Matrix2<f64>;

/// Basis ordering of a 2n-dimensional phase-space vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ordering {
    /// `(Q1, P1, Q2, P2, ..., Qn, Pn)`
    Mode,
    /// `(Q1, ..., Qn, P1, ..., Pn)`
    Quadrature,
}

/// Largest absolute entry.
pub fn max_abs(m: &MatrixN) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn max_abs2(m: &Mat2) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest `|m[i][j] - m[j][i]|`.
pub fn max_asymmetry(m: &MatrixN) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn symmetrize(m: &MatrixN) -> MatrixN {
    (m + m.transpose()) * 0.5
}

pub fn is_finite(m: &MatrixN) -> bool {
    m.iter().all(|x| x.is_finite())
}

/// Rotation factor of the Iwasawa decomposition, `[[cos φ, −sin φ], [sin φ, cos φ]]`.
pub fn rotation(phi: f64) -> Mat2 {
    let (s, c) = phi.sin_cos();
    Mat2::new(c, -s, s, c)
}

pub fn squeeze(r: f64) -> Mat2 {
    Mat2::new(r, 0.0, 0.0, 1.0 / r)
}

pub fn shear(q: f64) -> Mat2 {
    Mat2::new(1.0, 0.0, q, 1.0)
}

/// Signed singular value decomposition of a 2×2 matrix using proper rotations
/// only: `m = rotation(left) · diag(s1, s2) · rotation(right)` with
/// `s1 ≥ |s2|`. `s2` carries the sign of the determinant.
pub fn signed_svd2(m: &Mat2) -> (f64, f64, f64, f64) {
    let e = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let f = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let g = 0.5 * (m[(1, 0)] + m[(0, 1)]);
    let h = 0.5 * (m[(1, 0)] - m[(0, 1)]);
    let q = e.hypot(h);
    let r = f.hypot(g);
    let a1 = g.atan2(f);
    let a2 = h.atan2(e);
    let left = 0.5 * (a2 + a1);
    let right = 0.5 * (a2 - a1);
    (left, q + r, q - r, right)
}

/// Inverse of a symmetric positive-definite matrix together with its
/// spectral condition number.
pub fn spd_inverse(m: &MatrixN) -> Result<(MatrixN, f64)> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or(Error::InvalidCovariance("matrix is not positive definite"))?;
    let eig = SymmetricEigen::new(m.clone());
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    Ok((symmetrize(&chol.inverse()), condition))
}

/// Permutation taking mode-ordered indices to quadrature-ordered ones:
/// `perm[quadrature_index] = mode_index`.
pub(crate) fn quadrature_permutation(n: usize) -> Vec<usize> {
    (0..n)
        .map(|j| 2 * j)
        .chain((0..n).map(|j| 2 * j + 1))
        .collect()
}

pub(crate) fn permute(m: &MatrixN, perm: &[usize]) -> MatrixN {
    MatrixN::from_fn(perm.len(), perm.len(), |i, j| m[(perm[i], perm[j])])
}

pub(crate) fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = alloc::vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}
