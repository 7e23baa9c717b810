//! Core numerics for deciding whether a pure Gaussian state is a valid
//! continuous-variable cluster state.
//!
//! The crate is `no_std` (it needs `alloc`) and has no IO. It provides
//!
//! * [`symplectic`]: the symplectic form, Iwasawa parametrisation of
//!   single-mode operations and symplectic eigenvalues,
//! * [`state`]: pure zero-mean Gaussian states as mode-ordered covariance
//!   matrices, evolved by Gaussian circuits and local operations,
//! * [`graph`]: the complex-graph description `Z = V + iU` of a pure state,
//! * [`diagnostics`]: block determinants, the irreducibility criterion and
//!   partial-transpose symplectic eigenvalues,
//! * [`reducer`]: the search for Gaussian local unitaries (GLUs) that make
//!   `U` diagonal.
//!
//! Quadratures use the vacuum-variance-½ convention throughout.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod diagnostics;
mod error;
pub mod graph;
pub mod linalg;
pub mod reducer;
pub mod state;
pub mod symplectic;

pub use error::{Error, Result};
pub use linalg::{Mat2, MatrixN, Ordering};

/// Default absolute tolerance for matrix-equality assertions.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub mod prelude {
    pub use crate::diagnostics::{
        correlation_determinants, entanglement_flag, ppt_symplectic_eigenvalues,
        sufficient_criterion, CriterionVerdict, DetMatrix, Witness,
    };
    pub use crate::graph::{
        closed_form_btheta, graph_error, graph_from_state, nullifier_covariance, state_from_graph,
        BthetaWeights, ComplexGraph, GraphErrorMeasure,
    };
    pub use crate::reducer::{
        reduce, remove_self_loops, three_mode_reduce, ReduceConfig, ReductionMetadata,
        ReductionResult, ReductionSuccess, Route,
    };
    pub use crate::state::{
        apply_circuit, apply_glus, apply_symplectic, block, build_btheta, gate_symplectic, reorder,
        two_mode_squeezed, vacuum, CircuitOp, GaussianState, GluSet,
    };
    pub use crate::symplectic::{
        direct_sum, is_symplectic, iwasawa_compose, iwasawa_decompose, symplectic_eigenvalues,
        symplectic_form, IwasawaParams,
    };
    pub use crate::{Error, Mat2, MatrixN, Ordering, Result};
}
