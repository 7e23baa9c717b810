//! Closed-form chaining of GLUs along the first block row, and the final
//! phase equation.
//!
//! With `S₂ = diag(r₂, 1/r₂) R(φ₂)` left free, `S₁[S₂]` brings `σ₁₂` to
//! standard form for every `(φ₂, r₂)`, and `S_j[S₂]` then does the same for
//! `σ₁ⱼ`. One remaining block fixes `φ₂` through
//! `A cos 2φ₂ + B sin 2φ₂ + C = 0`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::Mat2;
use crate::{Error, Result};

fn entries(m: &Mat2) -> (f64, f64, f64, f64) {
    (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

fn negative_delta(m: &Mat2) -> Result<f64> {
    let det = m.determinant();
    if !(det < 0.0) {
        return Err(Error::WrongBranch { det });
    }
    Ok((-det).sqrt())
}

/// `S₁` such that `S₁ σ₁₂ S₂ᵀ` is standard for `S₂ = diag(r₂, 1/r₂) R(φ₂)`.
pub fn chain_s1_of_s2(sigma12: &Mat2, phi2: f64, r2: f64) -> Result<Mat2> {
    if !(r2 > 0.0) {
        return Err(Error::InvalidParameter("squeeze factor r must be positive"));
    }
    let (a, b, c, d) = entries(sigma12);
    let delta = negative_delta(sigma12)?;
    let epsilon = -2.0 * a * b - 2.0 * c * d;
    let tau = a * a - b * b + c * c - d * d;
    let rho = a * a + b * b + c * c + d * d;
    let (s, co) = phi2.sin_cos();
    let (s2, c2) = (2.0 * phi2).sin_cos();
    let den = epsilon * s2 + tau * c2 + rho;
    if !(den > 1e-300) {
        return Err(Error::DegeneratePhase);
    }
    let x = c * co - d * s;
    let y = b * s - a * co;
    let k = r2 / delta;
    let l = 2.0 * delta / (r2 * den);
    Ok(Mat2::new(k * x, k * y, -l * y, l * x))
}

/// Coefficients of `S_j[S₂]` derived from `σ₁₂` and `σ₁ⱼ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainCoefficients {
    pub gamma: f64,
    pub eta: f64,
    pub mu: f64,
    pub nu: f64,
    pub kappa: f64,
    pub zeta: f64,
    pub xi: f64,
}

impl ChainCoefficients {
    pub fn new(sigma12: &Mat2, sigma1j: &Mat2) -> Self {
        let (a12, b12, c12, d12) = entries(sigma12);
        let (a1j, b1j, c1j, d1j) = entries(sigma1j);
        let row0 = a1j * a1j + b1j * b1j;
        let row1 = c1j * c1j + d1j * d1j;
        let cross = a1j * c1j + b1j * d1j;
        ChainCoefficients {
            gamma: b12 * d1j - d12 * b1j,
            eta: c12 * b1j - a12 * d1j,
            mu: d12 * a1j - b12 * c1j,
            nu: a12 * c1j - c12 * a1j,
            kappa: 0.5
                * ((c12 * c12 + d12 * d12) * row0 - 2.0 * (a12 * c12 + b12 * d12) * cross
                    + (a12 * a12 + b12 * b12) * row1),
            zeta: -c12 * d12 * row0 + (a12 * d12 + b12 * c12) * cross - a12 * b12 * row1,
            xi: 0.5
                * ((c12 * c12 - d12 * d12) * row0
                    + 2.0 * (b12 * d12 - a12 * c12) * cross
                    + (a12 * a12 - b12 * b12) * row1),
        }
    }
}

/// `S_j` such that `S₁[S₂] σ₁ⱼ S_jᵀ` is standard, for `j ≥ 3`.
pub fn chain_sj_of_s2(sigma12: &Mat2, sigma1j: &Mat2, phi2: f64, r2: f64) -> Result<Mat2> {
    if !(r2 > 0.0) {
        return Err(Error::InvalidParameter("squeeze factor r must be positive"));
    }
    let d12 = negative_delta(sigma12)?;
    let d1j = negative_delta(sigma1j)?;
    let k = ChainCoefficients::new(sigma12, sigma1j);
    let (s, c) = phi2.sin_cos();
    let (s2, c2) = (2.0 * phi2).sin_cos();
    let den = k.zeta * s2 + k.kappa + k.xi * c2;
    if !(den.abs() > 1e-300) {
        return Err(Error::DegeneratePhase);
    }
    let x = k.gamma * s + k.eta * c;
    let y = k.mu * s + k.nu * c;
    let dd = d12 * d1j;
    Ok(Mat2::new(
        r2 / dd * x,
        r2 / dd * y,
        -dd / r2 * y / den,
        dd / r2 * x / den,
    ))
}

/// Relative slack allowed on `C² ≤ A² + B²` before a tangent root is rejected.
const TANGENT_SLACK: f64 = 1e-9;

/// Roots of `A cos 2φ + B sin 2φ + C = 0` with `φ ∈ [0, π)`, ascending.
///
/// Each root `φ` also stands for `φ + π`, which flips the sign of the
/// rotation (see [`with_pi_shifts`]). An identically vanishing equation
/// returns `[0]`; `C² > A² + B²` returns no roots.
pub fn solve_final_phase(a: f64, b: f64, c: f64) -> Vec<f64> {
    let pi = core::f64::consts::PI;
    let amp = a.hypot(b);
    if amp == 0.0 {
        return if c == 0.0 {
            alloc::vec![0.0]
        } else {
            Vec::new()
        };
    }
    let mut ratio = -c / amp;
    if ratio.abs() > 1.0 {
        if ratio.abs() - 1.0 > TANGENT_SLACK {
            return Vec::new();
        }
        ratio = ratio.signum();
    }
    let base = b.atan2(a);
    let spread = ratio.acos();
    let mut roots: Vec<f64> = Vec::with_capacity(2);
    for two_phi in [base - spread, base + spread] {
        let mut phi = num_traits::Euclid::rem_euclid(&(0.5 * two_phi), &pi);
        if pi - phi < 1e-13 {
            phi = 0.0;
        }
        if !roots.iter().any(|r: &f64| (r - phi).abs() < 1e-13) {
            roots.push(phi);
        }
    }
    roots.sort_by(|x, y| x.total_cmp(y));
    roots
}

/// Extends roots in `[0, π)` with their `π`-shifted copies, ascending in `[0, 2π)`.
pub fn with_pi_shifts(roots: &[f64]) -> Vec<f64> {
    let pi = core::f64::consts::PI;
    let mut all: Vec<f64> = roots.iter().flat_map(|&r| [r, r + pi]).collect();
    all.sort_by(|x, y| x.total_cmp(y));
    all
}
