//! Block determinants, the irreducibility criterion and partial-transpose
//! symplectic eigenvalues.
//!
//! `Det[σ_jk]` is unchanged by any GLU. A graph state with diagonal `U` has
//! `Det[σ_jk] = −λ_j λ_k V_jk² ≤ 0`, so any positive off-diagonal determinant
//! certifies that no GLU can make `U` diagonal.

use alloc::vec::Vec;

use crate::linalg::{max_abs, MatrixN, Ordering};
use crate::state::GaussianState;
use crate::symplectic::symplectic_eigenvalues_in;
use crate::{Error, Result};

/// Default criterion threshold, relative to the squared largest covariance entry.
pub const DEFAULT_CRITERION_THRESHOLD: f64 = 1e-10;

/// `Det[σ_jk]` for all mode pairs (diagonal: `Det[σ_jj]`).
#[derive(Debug, Clone, PartialEq)]
pub struct DetMatrix(pub MatrixN);

impl DetMatrix {
    pub fn modes(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.0[(j, k)]
    }

    pub fn matrix(&self) -> &MatrixN {
        &self.0
    }
}

/// A mode pair whose block determinant exceeds the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub j: usize,
    pub k: usize,
    pub det: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionVerdict {
    pub flagged: bool,
    pub witnesses: Vec<Witness>,
    /// Absolute threshold actually applied to the determinants.
    pub threshold: f64,
}

/// Scale used to make determinant thresholds dimensionless: `(max |σ|)²`.
pub fn determinant_scale(state: &GaussianState) -> f64 {
    let m = max_abs(state.sigma());
    m * m
}

pub fn correlation_determinants(state: &GaussianState) -> DetMatrix {
    let n = state.modes();
    DetMatrix(MatrixN::from_fn(n, n, |j, k| {
        state.block(j, k).determinant()
    }))
}

/// Flags the state when some `Det[σ_jk] > threshold · (max |σ|)²`, `j < k`.
pub fn sufficient_criterion(state: &GaussianState, threshold: f64) -> CriterionVerdict {
    let dets = correlation_determinants(state);
    let absolute = threshold * determinant_scale(state);
    let n = state.modes();
    let mut witnesses = Vec::new();
    for j in 0..n {
        for k in (j + 1)..n {
            let det = dets.get(j, k);
            if det > absolute {
                witnesses.push(Witness { j, k, det });
            }
        }
    }
    CriterionVerdict {
        flagged: !witnesses.is_empty(),
        witnesses,
        threshold: absolute,
    }
}

/// Symplectic eigenvalues of `ΛσΛ`, where `Λ` flips the sign of `P` on every
/// mode in `party_a` (0-based), sorted ascending.
pub fn ppt_symplectic_eigenvalues(state: &GaussianState, party_a: &[usize]) -> Result<Vec<f64>> {
    let n = state.modes();
    if party_a.is_empty() || party_a.len() >= n {
        return Err(Error::InvalidSubset(
            "party must be a nonempty proper subset",
        ));
    }
    let mut flip = alloc::vec![false; n];
    for &m in party_a {
        if m >= n {
            return Err(Error::ModeOutOfRange { index: m, modes: n });
        }
        if flip[m] {
            return Err(Error::InvalidSubset("repeated mode"));
        }
        flip[m] = true;
    }
    let sign = |i: usize| if i % 2 == 1 && flip[i / 2] { -1.0 } else { 1.0 };
    let sigma = state.sigma();
    let reflected = MatrixN::from_fn(2 * n, 2 * n, |i, j| sign(i) * sign(j) * sigma[(i, j)]);
    symplectic_eigenvalues_in(&reflected, Ordering::Mode, 1e-9)
}

/// True iff the smallest partial-transpose symplectic eigenvalue is below `½ − tol`.
pub fn entanglement_flag(state: &GaussianState, party_a: &[usize], tol: f64) -> Result<bool> {
    let nu = ppt_symplectic_eigenvalues(state, party_a)?;
    Ok(nu[0] < 0.5 - tol)
}
