//! Symplectic geometry primitives.
//!
//! The symplectic form is `Ω = [[0, 1], [−1, 0]]` in quadrature ordering
//! (all `Q` first, then all `P`); in mode ordering it is the direct sum of
//! `n` copies of the single-mode form. A matrix `S` is symplectic when
//! `S Ω Sᵀ = Ω`.

use alloc::vec::Vec;

use nalgebra::SymmetricEigen;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{self, max_abs, max_asymmetry, Mat2, MatrixN, Ordering};
use crate::{Error, Result};

/// Returns the 2n×2n symplectic form in quadrature ordering.
pub fn symplectic_form(n: usize) -> Result<MatrixN> {
    symplectic_form_in(n, Ordering::Quadrature)
}

pub fn symplectic_form_in(n: usize, ordering: Ordering) -> Result<MatrixN> {
    if n == 0 {
        return Err(Error::InvalidDimension("mode count must be at least 1"));
    }
    let mut omega = MatrixN::zeros(2 * n, 2 * n);
    for j in 0..n {
        let (q, p) = match ordering {
            Ordering::Quadrature => (j, n + j),
            Ordering::Mode => (2 * j, 2 * j + 1),
        };
        omega[(q, p)] = 1.0;
        omega[(p, q)] = -1.0;
    }
    Ok(omega)
}

fn mode_count(m: &MatrixN) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidDimension("matrix is not square"));
    }
    if m.nrows() == 0 || !m.nrows().is_multiple_of(2) {
        return Err(Error::InvalidDimension(
            "phase-space dimension must be even and nonzero",
        ));
    }
    Ok(m.nrows() / 2)
}

/// Max-norm of `S Ω Sᵀ − Ω`.
pub fn symplectic_deviation(s: &MatrixN, ordering: Ordering) -> Result<f64> {
    let n = mode_count(s)?;
    let omega = symplectic_form_in(n, ordering)?;
    Ok(max_abs(&(s * &omega * s.transpose() - omega)))
}

/// True iff `‖S Ω Sᵀ − Ω‖_max < tol`, with `S` in quadrature ordering.
pub fn is_symplectic(s: &MatrixN, tol: f64) -> Result<bool> {
    is_symplectic_in(s, Ordering::Quadrature, tol)
}

pub fn is_symplectic_in(s: &MatrixN, ordering: Ordering, tol: f64) -> Result<bool> {
    Ok(symplectic_deviation(s, ordering)? < tol)
}

/// Single-mode matrices are symplectic exactly when their determinant is one.
pub fn is_symplectic2(s: &Mat2, tol: f64) -> bool {
    (s.determinant() - 1.0).abs() < tol
}

/// Iwasawa parameters of a single-mode symplectic matrix:
/// `shear(q) · diag(r, 1/r) · rotation(phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IwasawaParams {
    pub q: f64,
    pub r: f64,
    pub phi: f64,
}

impl IwasawaParams {
    pub const IDENTITY: IwasawaParams = IwasawaParams {
        q: 0.0,
        r: 1.0,
        phi: 0.0,
    };

    pub fn new(q: f64, r: f64, phi: f64) -> Result<Self> {
        let p = IwasawaParams { q, r, phi };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.q.is_finite() && self.r.is_finite() && self.phi.is_finite()) {
            return Err(Error::InvalidParameter("Iwasawa parameters must be finite"));
        }
        if self.r <= 0.0 {
            return Err(Error::InvalidParameter("squeeze factor r must be positive"));
        }
        Ok(())
    }

    pub fn matrix(&self) -> Result<Mat2> {
        iwasawa_compose(self)
    }
}

pub fn iwasawa_compose(p: &IwasawaParams) -> Result<Mat2> {
    p.validate()?;
    Ok(linalg::shear(p.q) * linalg::squeeze(p.r) * linalg::rotation(p.phi))
}

/// Inverts [`iwasawa_compose`]. The first row of `S` is `r (cos φ, −sin φ)`,
/// which fixes `r > 0` and `φ ∈ (−π, π]`; the shear follows from the second row.
pub fn iwasawa_decompose(s: &Mat2, tol: f64) -> Result<IwasawaParams> {
    if !s.iter().all(|x| x.is_finite()) || !is_symplectic2(s, tol) {
        return Err(Error::InvalidParameter(
            "matrix is not a single-mode symplectic",
        ));
    }
    let (a, b) = (s[(0, 0)], s[(0, 1)]);
    let r = a.hypot(b);
    let phi = (-b).atan2(a);
    let q = (s[(1, 0)] * a + s[(1, 1)] * b) / (r * r);
    Ok(IwasawaParams { q, r, phi })
}

/// Block-diagonal (mode-ordered) matrix built from single-mode blocks.
pub fn direct_sum(blocks: &[Mat2]) -> Result<MatrixN> {
    if blocks.is_empty() {
        return Err(Error::InvalidDimension("direct sum of zero blocks"));
    }
    let n = blocks.len();
    let mut m = MatrixN::zeros(2 * n, 2 * n);
    for (j, b) in blocks.iter().enumerate() {
        m.fixed_view_mut::<2, 2>(2 * j, 2 * j).copy_from(b);
    }
    Ok(m)
}

/// Symplectic eigenvalues of a quadrature-ordered covariance matrix, ascending.
pub fn symplectic_eigenvalues(sigma: &MatrixN, tol: f64) -> Result<Vec<f64>> {
    symplectic_eigenvalues_in(sigma, Ordering::Quadrature, tol)
}

/// Symplectic eigenvalues for either ordering.
///
/// With `Σ = L Lᵀ`, `ΩΣ` is similar to the antisymmetric `A = Lᵀ Ω L`, whose
/// eigenvalues are `±iν`. The symmetric `AᵀA` therefore has every `ν²` twice.
pub fn symplectic_eigenvalues_in(
    sigma: &MatrixN,
    ordering: Ordering,
    tol: f64,
) -> Result<Vec<f64>> {
    let n = mode_count(sigma)?;
    if !linalg::is_finite(sigma) {
        return Err(Error::InvalidCovariance("non-finite entries"));
    }
    if max_asymmetry(sigma) > tol * (1.0 + max_abs(sigma)) {
        return Err(Error::InvalidCovariance("matrix is not symmetric"));
    }
    let sym = linalg::symmetrize(sigma);
    let chol = sym
        .cholesky()
        .ok_or(Error::InvalidCovariance("matrix is not positive definite"))?;
    let l = chol.l();
    let omega = symplectic_form_in(n, ordering)?;
    let a = l.transpose() * omega * &l;
    let gram = linalg::symmetrize(&(a.transpose() * &a));
    let mut squares: Vec<f64> = SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    squares.sort_by(|x, y| x.total_cmp(y));
    Ok(squares
        .chunks(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect())
}
