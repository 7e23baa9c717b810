//! Complex graphs `Z = V + iU` of pure Gaussian states.
//!
//! With quadrature-ordered covariance blocks, `U = (2 Cov[Q])⁻¹` and
//! `V = U · 2 Cov[Q, P]`; conversely
//! `Σ = ½ [[U⁻¹, U⁻¹V], [VU⁻¹, U + VU⁻¹V]]`.

use crate::linalg::{self, max_abs, max_asymmetry, MatrixN, Ordering};
use crate::state::{reorder, GaussianState};
use crate::{Error, Result, DEFAULT_TOLERANCE};
#[allow(unused_imports)]
use num_traits::Float;

/// Largest spectral condition number of `2 Cov[Q]` accepted for inversion.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGraph {
    pub v: MatrixN,
    pub u: MatrixN,
}

impl ComplexGraph {
    /// Validates shapes, symmetry (relative `tol`) and positive definiteness of `U`.
    pub fn new(v: MatrixN, u: MatrixN, tol: f64) -> Result<Self> {
        let n = v.nrows();
        if n == 0 || v.ncols() != n || u.nrows() != n || u.ncols() != n {
            return Err(Error::InvalidGraph(
                "V and U must be square with the same size",
            ));
        }
        if !linalg::is_finite(&v) || !linalg::is_finite(&u) {
            return Err(Error::InvalidGraph("non-finite entries"));
        }
        if max_asymmetry(&v) > tol * (1.0 + max_abs(&v)) {
            return Err(Error::InvalidGraph("V is not symmetric"));
        }
        if max_asymmetry(&u) > tol * (1.0 + max_abs(&u)) {
            return Err(Error::InvalidGraph("U is not symmetric"));
        }
        let u = linalg::symmetrize(&u);
        if u.clone().cholesky().is_none() {
            return Err(Error::InvalidGraph("U is not positive definite"));
        }
        Ok(ComplexGraph {
            v: linalg::symmetrize(&v),
            u,
        })
    }

    pub fn modes(&self) -> usize {
        self.v.nrows()
    }
}

/// Extracts `(V, U)` from a pure state.
pub fn graph_from_state(state: &GaussianState) -> Result<ComplexGraph> {
    graph_from_state_tol(state, DEFAULT_TOLERANCE)
}

pub fn graph_from_state_tol(state: &GaussianState, tol: f64) -> Result<ComplexGraph> {
    let n = state.modes();
    let quad = state.sigma_in(Ordering::Quadrature);
    let cq = quad.view((0, 0), (n, n)) * 2.0;
    let cqp = quad.view((0, n), (n, n)) * 2.0;
    let (u, condition) = linalg::spd_inverse(&cq).map_err(|_| Error::IllConditioned {
        condition: f64::INFINITY,
    })?;
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let v = &u * cqp;
    let deviation = max_asymmetry(&v);
    if deviation > tol * (1.0 + max_abs(&v)) * state.scale().max(1.0) {
        return Err(Error::ImpureState { deviation });
    }
    Ok(ComplexGraph {
        v: linalg::symmetrize(&v),
        u,
    })
}

/// Builds the pure state described by a graph.
pub fn state_from_graph(g: &ComplexGraph) -> Result<GaussianState> {
    let n = g.modes();
    let (ui, _) =
        linalg::spd_inverse(&g.u).map_err(|_| Error::InvalidGraph("U is not positive definite"))?;
    let uiv = &ui * &g.v;
    let mut quad = MatrixN::zeros(2 * n, 2 * n);
    quad.view_mut((0, 0), (n, n)).copy_from(&(&ui * 0.5));
    quad.view_mut((0, n), (n, n)).copy_from(&(&uiv * 0.5));
    quad.view_mut((n, 0), (n, n))
        .copy_from(&(uiv.transpose() * 0.5));
    quad.view_mut((n, n), (n, n))
        .copy_from(&((&g.u + &g.v * &uiv) * 0.5));
    let sigma = reorder(
        &linalg::symmetrize(&quad),
        Ordering::Quadrature,
        Ordering::Mode,
    )?;
    Ok(GaussianState::from_trusted(sigma))
}

/// `Cov[P − VQ]` for an arbitrary symmetric `V`.
pub fn nullifier_covariance(state: &GaussianState, v: &MatrixN) -> Result<MatrixN> {
    let n = state.modes();
    if v.nrows() != n || v.ncols() != n {
        return Err(Error::InvalidDimension("V does not match the mode count"));
    }
    let quad = state.sigma_in(Ordering::Quadrature);
    let cqq = quad.view((0, 0), (n, n)).into_owned();
    let cqp = quad.view((0, n), (n, n)).into_owned();
    let cpp = quad.view((n, n), (n, n)).into_owned();
    let vcqp = v * &cqp;
    Ok(linalg::symmetrize(
        &(cpp - &vcqp - vcqp.transpose() + v * cqq * v.transpose()),
    ))
}

/// Figures of merit of a graph as an approximation of an ideal cluster state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphErrorMeasure {
    pub trace_u: f64,
    /// `max |U_jk|` over `j ≠ k`.
    pub off_diagonal_norm_u: f64,
}

pub fn graph_error(g: &ComplexGraph) -> GraphErrorMeasure {
    let n = g.modes();
    let mut off = 0.0_f64;
    for j in 0..n {
        for k in 0..n {
            if j != k {
                off = off.max(g.u[(j, k)].abs());
            }
        }
    }
    GraphErrorMeasure {
        trace_u: g.u.trace(),
        off_diagonal_norm_u: off,
    }
}

/// Closed-form weights of the `B(θ, r₁, r₂)` graph `Z = v·𝟙 + i[[u₊, u₋], [u₋, u₊]]`
/// in the reference normalisation.
///
/// With vacuum variance ½ the extracted `U` equals `½ [[u₊, u₋], [u₋, u₊]]`;
/// [`BthetaWeights::graph`] applies that factor. `V` needs no rescaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BthetaWeights {
    pub v: f64,
    pub u_plus: f64,
    pub u_minus: f64,
}

impl BthetaWeights {
    pub const U_PREFACTOR: f64 = 0.5;

    pub fn graph(&self) -> ComplexGraph {
        let h = Self::U_PREFACTOR;
        ComplexGraph {
            v: MatrixN::from_element(2, 2, self.v),
            u: MatrixN::from_row_slice(
                2,
                2,
                &[
                    h * self.u_plus,
                    h * self.u_minus,
                    h * self.u_minus,
                    h * self.u_plus,
                ],
            ),
        }
    }
}

pub fn closed_form_btheta(theta: f64, r1: f64, r2: f64) -> BthetaWeights {
    let (s, c) = theta.sin_cos();
    let (e1, e2) = ((2.0 * r1).exp(), (-2.0 * r2).exp());
    let v = -(2.0 * theta).sin() * (2.0 * r1).sinh() / (2.0 * (e1 * c * c + s * s / e1));
    let a = (1.0 / e1) / (c * c + s * s / (e1 * e1));
    BthetaWeights {
        v,
        u_plus: a + e2,
        u_minus: a - e2,
    }
}
