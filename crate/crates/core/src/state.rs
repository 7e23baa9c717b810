//! Pure zero-mean Gaussian states and their evolution.
//!
//! States are stored as mode-ordered covariance matrices and evolve in the
//! Heisenberg picture: a gate with symplectic matrix `S` maps the covariance
//! `σ` to `S σ Sᵀ`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{self, max_abs, max_asymmetry, Mat2, MatrixN, Ordering};
use crate::symplectic::{self, iwasawa_decompose, IwasawaParams};
use crate::{Error, Result};

/// Maximum allowed `|ν − ½|` over the symplectic eigenvalues of a pure state.
pub const PURITY_TOLERANCE: f64 = 1e-8;

/// A pure zero-mean Gaussian state of `n` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    sigma: MatrixN,
}

impl GaussianState {
    /// Validates a mode-ordered covariance matrix: symmetric, positive definite and pure.
    pub fn new(sigma: MatrixN) -> Result<Self> {
        Self::with_tolerance(sigma, PURITY_TOLERANCE)
    }

    pub fn with_tolerance(sigma: MatrixN, tol: f64) -> Result<Self> {
        let deviation = purity_deviation(&sigma, tol)?;
        if deviation > tol {
            return Err(Error::ImpureState { deviation });
        }
        Ok(GaussianState {
            sigma: linalg::symmetrize(&sigma),
        })
    }

    pub fn from_ordering(sigma: MatrixN, ordering: Ordering) -> Result<Self> {
        Self::new(reorder(&sigma, ordering, Ordering::Mode)?)
    }

    /// Skips validation; for results of operations that preserve purity exactly.
    pub(crate) fn from_trusted(sigma: MatrixN) -> Self {
        GaussianState {
            sigma: linalg::symmetrize(&sigma),
        }
    }

    pub fn modes(&self) -> usize {
        self.sigma.nrows() / 2
    }

    /// Mode-ordered covariance matrix.
    pub fn sigma(&self) -> &MatrixN {
        &self.sigma
    }

    pub fn sigma_in(&self, ordering: Ordering) -> MatrixN {
        match ordering {
            Ordering::Mode => self.sigma.clone(),
            Ordering::Quadrature => {
                linalg::permute(&self.sigma, &linalg::quadrature_permutation(self.modes()))
            }
        }
    }

    /// Largest entry magnitude, used to scale thresholds.
    pub fn scale(&self) -> f64 {
        max_abs(&self.sigma)
    }

    pub fn block(&self, j: usize, k: usize) -> Mat2 {
        self.sigma.fixed_view::<2, 2>(2 * j, 2 * k).into_owned()
    }

    /// Restriction to a subset of modes, in the given order.
    pub fn reduced(&self, modes: &[usize]) -> Result<GaussianState> {
        let n = self.modes();
        let mut idx = Vec::with_capacity(2 * modes.len());
        for &m in modes {
            check_mode(m, n)?;
            idx.push(2 * m);
            idx.push(2 * m + 1);
        }
        if idx.is_empty() {
            return Err(Error::InvalidDimension("empty mode subset"));
        }
        Ok(GaussianState {
            sigma: linalg::permute(&self.sigma, &idx),
        })
    }
}

/// Largest `|ν − ½|` over the symplectic eigenvalues of a mode-ordered covariance.
pub fn purity_deviation(sigma: &MatrixN, tol: f64) -> Result<f64> {
    let scaled = tol * (1.0 + max_abs(sigma));
    if max_asymmetry(sigma) > scaled {
        return Err(Error::InvalidCovariance("matrix is not symmetric"));
    }
    let nu = symplectic::symplectic_eigenvalues_in(sigma, Ordering::Mode, scaled)?;
    Ok(nu.iter().fold(0.0, |acc, x| acc.max((x - 0.5).abs())))
}

fn check_mode(index: usize, modes: usize) -> Result<()> {
    if index >= modes {
        Err(Error::ModeOutOfRange { index, modes })
    } else {
        Ok(())
    }
}

pub fn vacuum(n: usize) -> Result<GaussianState> {
    if n == 0 {
        return Err(Error::InvalidDimension("mode count must be at least 1"));
    }
    Ok(GaussianState {
        sigma: MatrixN::identity(2 * n, 2 * n) * 0.5,
    })
}

/// Two-mode squeezed vacuum `E(r)`: nullifiers `Q1 − Q2` and `P1 + P2` for `r > 0`.
pub fn two_mode_squeezed(r: f64) -> Result<GaussianState> {
    if !r.is_finite() {
        return Err(Error::InvalidParameter("squeezing must be finite"));
    }
    let (c, s) = (r.cosh(), r.sinh());
    let mut m = MatrixN::identity(4, 4) * c;
    m[(0, 2)] = s;
    m[(2, 0)] = s;
    m[(1, 3)] = -s;
    m[(3, 1)] = -s;
    apply_symplectic(&vacuum(2)?, &m, Ordering::Mode)
}

/// Permutation-conjugates a 2n×2n matrix between orderings.
pub fn reorder(m: &MatrixN, from: Ordering, to: Ordering) -> Result<MatrixN> {
    if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
        return Err(Error::InvalidDimension(
            "expected a square matrix of even dimension",
        ));
    }
    let perm = linalg::quadrature_permutation(m.nrows() / 2);
    Ok(match (from, to) {
        (Ordering::Mode, Ordering::Quadrature) => linalg::permute(m, &perm),
        (Ordering::Quadrature, Ordering::Mode) => {
            linalg::permute(m, &linalg::inverse_permutation(&perm))
        }
        _ => m.clone(),
    })
}

/// `σ → S σ Sᵀ` for a symplectic `S` given in `ordering`.
pub fn apply_symplectic(
    state: &GaussianState,
    s: &MatrixN,
    ordering: Ordering,
) -> Result<GaussianState> {
    if s.nrows() != state.sigma.nrows() || s.ncols() != state.sigma.ncols() {
        return Err(Error::InvalidDimension(
            "symplectic matrix does not match the state",
        ));
    }
    let deviation = symplectic::symplectic_deviation(s, ordering)?;
    if !(deviation < 1e-9 * (1.0 + max_abs(s)).powi(2)) {
        return Err(Error::NotSymplectic { deviation });
    }
    let s = reorder(s, ordering, Ordering::Mode)?;
    Ok(GaussianState::from_trusted(
        &s * &state.sigma * s.transpose(),
    ))
}

/// Returns `σ_jk` (0-based mode indices).
pub fn block(state: &GaussianState, j: usize, k: usize) -> Result<Mat2> {
    check_mode(j, state.modes())?;
    check_mode(k, state.modes())?;
    Ok(state.block(j, k))
}

/// Gaussian local unitary: one 2×2 symplectic matrix per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct GluSet {
    blocks: Vec<Mat2>,
}

impl GluSet {
    /// Tolerance on `|det S_j − 1|`, relative to `1 + ‖S_j‖²`.
    pub const TOLERANCE: f64 = 1e-9;

    pub fn new(blocks: Vec<Mat2>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidDimension("GLU set needs at least one mode"));
        }
        for b in &blocks {
            let deviation = (b.determinant() - 1.0).abs();
            if !b.iter().all(|x| x.is_finite())
                || !(deviation <= Self::TOLERANCE * (1.0 + linalg::max_abs2(b).powi(2)))
            {
                return Err(Error::NotSymplectic { deviation });
            }
        }
        Ok(GluSet { blocks })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(alloc::vec![Mat2::identity(); n])
    }

    pub fn from_params(params: &[IwasawaParams]) -> Result<Self> {
        let blocks = params
            .iter()
            .map(symplectic::iwasawa_compose)
            .collect::<Result<Vec<_>>>()?;
        Self::new(blocks)
    }

    pub fn modes(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Mat2] {
        &self.blocks
    }

    /// Mode-ordered 2n×2n block-diagonal matrix.
    pub fn to_matrix(&self) -> MatrixN {
        symplectic::direct_sum(&self.blocks).expect("GLU set is never empty")
    }

    pub fn params(&self) -> Result<Vec<IwasawaParams>> {
        self.blocks
            .iter()
            .map(|b| iwasawa_decompose(b, 1e-8 * (1.0 + linalg::max_abs2(b).powi(2))))
            .collect()
    }

    /// Applies `self` first and `then` afterwards.
    pub fn then(&self, then: &GluSet) -> Result<GluSet> {
        if self.modes() != then.modes() {
            return Err(Error::InvalidDimension(
                "GLU sets act on different mode counts",
            ));
        }
        Ok(GluSet {
            blocks: self
                .blocks
                .iter()
                .zip(&then.blocks)
                .map(|(a, b)| b * a)
                .collect(),
        })
    }

    pub fn inverse(&self) -> GluSet {
        GluSet {
            blocks: self
                .blocks
                .iter()
                .map(|b| Mat2::new(b[(1, 1)], -b[(0, 1)], -b[(1, 0)], b[(0, 0)]))
                .collect(),
        }
    }
}

/// `σ_jk → S_j σ_jk S_kᵀ` for every block.
pub fn apply_glus(state: &GaussianState, glus: &GluSet) -> Result<GaussianState> {
    if glus.modes() != state.modes() {
        return Err(Error::InvalidDimension("GLU set does not match the state"));
    }
    Ok(GaussianState::from_trusted(apply_glus_raw(
        &state.sigma,
        glus.blocks(),
    )))
}

pub(crate) fn apply_glus_raw(sigma: &MatrixN, blocks: &[Mat2]) -> MatrixN {
    let mut out = sigma.clone();
    for (j, sj) in blocks.iter().enumerate() {
        for (k, sk) in blocks.iter().enumerate() {
            let b = sigma.fixed_view::<2, 2>(2 * j, 2 * k).into_owned();
            out.fixed_view_mut::<2, 2>(2 * j, 2 * k)
                .copy_from(&(sj * b * sk.transpose()));
        }
    }
    out
}

/// A Gaussian gate. Mode indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitOp {
    /// Phase squeezing: `Var P` shrinks by `e^{−2r}` for `r > 0`.
    Squeeze {
        mode: usize,
        r: f64,
    },
    /// Phase-space rotation `exp(−iθ a†a)`.
    Rotate {
        mode: usize,
        theta: f64,
    },
    /// `P → P + q Q`.
    Shear {
        mode: usize,
        q: f64,
    },
    /// `Q_j → (Q_j − Q_k)/√2`, `Q_k → (Q_j + Q_k)/√2`, same for `P`.
    BalancedBeamsplitter {
        j: usize,
        k: usize,
    },
    /// `P_j → P_j + g Q_k`, `P_k → P_k + g Q_j`.
    Cz {
        j: usize,
        k: usize,
        g: f64,
    },
    LocalSymplectic {
        mode: usize,
        matrix: Mat2,
    },
}

fn single_mode_block(op: &CircuitOp) -> Option<(usize, Mat2)> {
    match *op {
        CircuitOp::Squeeze { mode, r } => Some((mode, Mat2::new(r.exp(), 0.0, 0.0, (-r).exp()))),
        CircuitOp::Rotate { mode, theta } => {
            let (s, c) = theta.sin_cos();
            Some((mode, Mat2::new(c, s, -s, c)))
        }
        CircuitOp::Shear { mode, q } => Some((mode, linalg::shear(q))),
        CircuitOp::LocalSymplectic { mode, matrix } => Some((mode, matrix)),
        _ => None,
    }
}

fn check_pair(j: usize, k: usize, n: usize) -> Result<()> {
    check_mode(j, n)?;
    check_mode(k, n)?;
    if j == k {
        return Err(Error::InvalidParameter(
            "two-mode gate needs distinct modes",
        ));
    }
    Ok(())
}

/// Mode-ordered symplectic matrix of a gate on `n` modes.
pub fn gate_symplectic(op: &CircuitOp, n: usize) -> Result<MatrixN> {
    if n == 0 {
        return Err(Error::InvalidDimension("mode count must be at least 1"));
    }
    let finite = match *op {
        CircuitOp::Squeeze { r: x, .. }
        | CircuitOp::Rotate { theta: x, .. }
        | CircuitOp::Shear { q: x, .. }
        | CircuitOp::Cz { g: x, .. } => x.is_finite(),
        CircuitOp::LocalSymplectic { matrix, .. } => matrix.iter().all(|x| x.is_finite()),
        CircuitOp::BalancedBeamsplitter { .. } => true,
    };
    if !finite {
        return Err(Error::InvalidParameter("gate parameters must be finite"));
    }
    let mut s = MatrixN::identity(2 * n, 2 * n);
    if let Some((mode, b)) = single_mode_block(op) {
        check_mode(mode, n)?;
        let deviation = (b.determinant() - 1.0).abs();
        if !(deviation <= GluSet::TOLERANCE * (1.0 + linalg::max_abs2(&b).powi(2))) {
            return Err(Error::NotSymplectic { deviation });
        }
        s.fixed_view_mut::<2, 2>(2 * mode, 2 * mode).copy_from(&b);
        return Ok(s);
    }
    match *op {
        CircuitOp::BalancedBeamsplitter { j, k } => {
            check_pair(j, k, n)?;
            let h = core::f64::consts::FRAC_1_SQRT_2;
            for o in 0..2 {
                let (a, b) = (2 * j + o, 2 * k + o);
                s[(a, a)] = h;
                s[(a, b)] = -h;
                s[(b, a)] = h;
                s[(b, b)] = h;
            }
        }
        CircuitOp::Cz { j, k, g } => {
            check_pair(j, k, n)?;
            s[(2 * j + 1, 2 * k)] = g;
            s[(2 * k + 1, 2 * j)] = g;
        }
        _ => unreachable!("single-mode gates handled above"),
    }
    Ok(s)
}

/// Applies the gates left to right.
pub fn apply_circuit(state: &GaussianState, ops: &[CircuitOp]) -> Result<GaussianState> {
    let n = state.modes();
    let mut sigma = state.sigma.clone();
    for op in ops {
        let s = gate_symplectic(op, n)?;
        sigma = &s * sigma * s.transpose();
    }
    Ok(GaussianState::from_trusted(sigma))
}

/// `B₁₂ R₁(θ) S₁(r₁) S₂(r₂)` applied to two-mode vacuum.
pub fn build_btheta(theta: f64, r1: f64, r2: f64) -> Result<GaussianState> {
    apply_circuit(
        &vacuum(2)?,
        &[
            CircuitOp::Squeeze { mode: 0, r: r1 },
            CircuitOp::Squeeze { mode: 1, r: r2 },
            CircuitOp::Rotate { mode: 0, theta },
            CircuitOp::BalancedBeamsplitter { j: 0, k: 1 },
        ],
    )
}
