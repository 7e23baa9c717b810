//! Three-mode construction: bring all three correlation blocks to diagonal
//! form, squeeze so two of them become `∝ diag(1, −1)`, then fix the last one
//! with a common rotation on modes 2 and 3.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::search::{self, Dir};
use super::{
    chained, local_form, metadata, reduce_with, Attempt, Directions, ReduceConfig, ReductionResult,
    Route,
};
use crate::linalg::{rotation, signed_svd2, Mat2};
use crate::state::{apply_glus_raw, GaussianState};
use crate::symplectic::iwasawa_compose;
use crate::{Error, Result};

/// Relative size of the off-diagonal entries tolerated in the diagonalised blocks.
const DIAGONAL_TOL: f64 = 1e-8;

fn is_diagonal(m: &Mat2) -> bool {
    m[(0, 1)].abs().max(m[(1, 0)].abs()) <= DIAGONAL_TOL * m.norm()
}

/// First rows of the three-mode construction, or `None` when the state does
/// not fit its assumptions (some block not of full rank or not diagonalisable
/// by rotations alone).
fn construction(state: &GaussianState) -> Option<Vec<Dir>> {
    let e0 = Dir::new(1.0, 0.0);
    // balance: σ_jj ∝ I
    let balance: Vec<Mat2> = (0..3)
        .map(|j| iwasawa_compose(&local_form(&e0, &state.block(j, j))).ok())
        .collect::<Option<_>>()?;
    let balanced = GaussianState::from_trusted(apply_glus_raw(state.sigma(), &balance));

    let (left, _, _, right) = signed_svd2(&balanced.block(0, 1));
    let r1 = rotation(-left);
    let r2 = rotation(right);
    let m = r1 * balanced.block(0, 2);
    let row = if m.row(0).norm() >= m.row(1).norm() * DIAGONAL_TOL {
        m.row(0)
    } else {
        m.row(1)
    };
    let o = row / row.norm();
    let r3 = rotation((-o[1]).atan2(o[0]));
    let rots = [r1, r2, r3];
    let d = |j: usize, k: usize| rots[j] * balanced.block(j, k) * rots[k].transpose();
    let (d12, d13, d23) = (d(0, 1), d(0, 2), d(1, 2));
    if !(is_diagonal(&d12) && is_diagonal(&d13) && is_diagonal(&d23)) {
        return None;
    }
    let ab = |m: &Mat2| (m[(0, 0)], m[(1, 1)]);
    let ((a12, b12), (a13, b13), (a23, b23)) = (ab(&d12), ab(&d13), ab(&d23));
    if !(a12 * b12 < 0.0 && a13 * b13 < 0.0 && a23 * b23 < 0.0) {
        return None;
    }

    // squeeze: D₁₂ and D₁₃ become multiples of diag(1, −1)
    let x1 = (-b12 / a12).sqrt();
    let x3 = (-b13 / a13).sqrt() / x1;
    let sq = |x: f64| Mat2::new(x, 0.0, 0.0, 1.0 / x);
    let (s1a, s2a, s3a) = (sq(x1), Mat2::identity(), sq(x3));
    let (a, b) = (a23 * x3, b23 / x3);

    // rotation: α′c² + β′s² = 0 on the remaining block
    let c = (b / (b - a)).sqrt();
    let s = (-a / (b - a)).sqrt();
    let s2b = Mat2::new(c, s, -s, c);
    let f = Mat2::new(0.0, 1.0, -1.0, 0.0);
    let s1b = f * s2b.transpose();
    let s3b = s2b;

    let totals = [
        s1b * s1a * rots[0] * balance[0],
        s2b * s2a * rots[1] * balance[1],
        s3b * s3a * rots[2] * balance[2],
    ];
    let dirs: Vec<Dir> = totals
        .iter()
        .map(|t| Dir::new(t[(0, 0)], t[(0, 1)]))
        .collect();
    dirs.iter()
        .all(|d| d.iter().all(|x| x.is_finite()))
        .then_some(dirs)
}

pub(crate) fn attempt(state: &GaussianState, cfg: &ReduceConfig) -> Attempt {
    let comps = search::components(&search::classify(state, cfg));
    if let Some(dirs) = construction(state) {
        if search::worst_correlation(state, &dirs) <= cfg.branch_tol {
            return Attempt::Found(Directions {
                dirs,
                branches: 1,
                metadata: metadata(Route::ThreeMode, comps),
            });
        }
    }
    match chained(state, cfg) {
        Attempt::Found(mut d) => {
            d.metadata.fallback = true;
            Attempt::Found(d)
        }
        other => other,
    }
}

/// Reduction of a three-mode state. All three `Det[σ_jk] ≤ 0` suffices for success.
pub fn three_mode_reduce(state: &GaussianState, cfg: &ReduceConfig) -> Result<ReductionResult> {
    if state.modes() != 3 {
        return Err(Error::InvalidDimension(
            "three_mode_reduce needs exactly three modes",
        ));
    }
    reduce_with(state, cfg, |s, c| Ok(attempt(s, c)))
}
