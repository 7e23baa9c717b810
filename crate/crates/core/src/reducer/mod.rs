//! Construction of the GLUs that remove every `⟨Q_j Q_k⟩`, `j ≠ k`, which
//! makes the imaginary graph part `U` diagonal.

pub mod chain;
mod search;
pub mod standard;
mod three_mode;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

pub use chain::{
    chain_s1_of_s2, chain_sj_of_s2, solve_final_phase, with_pi_shifts, ChainCoefficients,
};
pub use standard::{
    left_standardize, right_standardize, singular_align, standardize_t, Side, SingularAlignment,
    StandardBlock,
};
pub use three_mode::three_mode_reduce;

use crate::diagnostics::{sufficient_criterion, CriterionVerdict, DEFAULT_CRITERION_THRESHOLD};
use crate::graph::{graph_from_state, ComplexGraph};
use crate::linalg::{rotation, shear, Mat2};
use crate::state::{apply_glus, GaussianState, GluSet};
use crate::symplectic::{iwasawa_compose, IwasawaParams};
use crate::{Error, Result};
use search::{Dir, Kind, SearchOutcome};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReduceConfig {
    /// Success requires `max |U′_jk| < tol · (1 + max U′_jj)` for `j ≠ k`.
    pub tol: f64,
    /// Acceptance threshold for a branch, on normalised `QQ` correlations.
    pub branch_tol: f64,
    /// Relative threshold passed to the irreducibility criterion.
    pub criterion_threshold: f64,
    /// Blocks with `|Det| ≤ singular_threshold · ‖σ_jk‖²` are treated as singular.
    pub singular_threshold: f64,
    /// Upper bound on the number of candidate branches verified.
    pub max_branches: usize,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        ReduceConfig {
            tol: 1e-8,
            branch_tol: 1e-6,
            criterion_threshold: DEFAULT_CRITERION_THRESHOLD,
            singular_threshold: 1e-10,
            max_branches: 4096,
        }
    }
}

/// Which construction produced the first rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// No mode is correlated with any other.
    Trivial,
    /// Direct standardization of `σ₁₂`.
    TwoMode,
    /// Squeeze-and-rotate construction for three modes.
    ThreeMode,
    /// Chained first rows with branch search.
    Chained,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionMetadata {
    pub route: Route,
    /// Modes grouped by nonzero correlation blocks.
    pub components: Vec<Vec<usize>>,
    /// Groups of modes linked by blocks with nonzero determinant.
    pub clusters: usize,
    /// Clusters whose angle was not fixed by any closing equation.
    pub free_clusters: usize,
    /// Mode pair whose equation fixed each constrained cluster's angle.
    pub closing_pairs: Vec<(usize, usize)>,
    /// The three-mode construction did not apply and the branch search ran instead.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionSuccess {
    /// GLUs taking the input state to the reduced one.
    pub glus: GluSet,
    pub params: Vec<IwasawaParams>,
    pub state: GaussianState,
    pub graph: ComplexGraph,
    /// Largest off-diagonal `|U′_jk|`.
    pub residual: f64,
    pub branches_tried: usize,
    pub metadata: ReductionMetadata,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum ReductionResult {
    Success(ReductionSuccess),
    Irreducible(CriterionVerdict),
    Failed {
        branches_tried: usize,
        best_residual: f64,
    },
}

impl ReductionResult {
    pub fn is_success(&self) -> bool {
        matches!(self, ReductionResult::Success(_))
    }

    pub fn success(&self) -> Option<&ReductionSuccess> {
        match self {
            ReductionResult::Success(s) => Some(s),
            _ => None,
        }
    }
}

/// Shears `[[1, 0], [−V_jj, 1]]` that clear the real self-loops.
pub fn remove_self_loops(state: &GaussianState) -> Result<(GluSet, GaussianState)> {
    let g = graph_from_state(state)?;
    let blocks = (0..state.modes()).map(|j| shear(-g.v[(j, j)])).collect();
    let glus = GluSet::new(blocks)?;
    let out = apply_glus(state, &glus)?;
    Ok((glus, out))
}

/// Local GLU with first row along `u` that brings `σ_jj` to `√Det · I`.
pub(crate) fn local_form(u: &Dir, sigma_jj: &Mat2) -> IwasawaParams {
    let mut u = u / u.norm();
    if u[0] < 0.0 || (u[0] == 0.0 && u[1] < 0.0) {
        u = -u;
    }
    let phi = (-u[1]).atan2(u[0]);
    let rot = rotation(phi);
    let m = rot * sigma_jj * rot.transpose();
    let (a, b) = (m[(0, 0)], m[(0, 1)]);
    let root = sigma_jj.determinant().sqrt();
    let r2 = root / a;
    IwasawaParams {
        q: -b / (r2 * a),
        r: r2.sqrt(),
        phi,
    }
}

pub(crate) struct Directions {
    pub dirs: Vec<Dir>,
    pub branches: usize,
    pub metadata: ReductionMetadata,
}

pub(crate) enum Attempt {
    Found(Directions),
    Exhausted { branches: usize, best: f64 },
}

/// Runs the full pipeline on a state whose criterion is silent.
pub(crate) fn reduce_with(
    state: &GaussianState,
    cfg: &ReduceConfig,
    route: RouteFn,
) -> Result<ReductionResult> {
    let verdict = sufficient_criterion(state, cfg.criterion_threshold);
    if verdict.flagged {
        return Ok(ReductionResult::Irreducible(verdict));
    }
    let (mut glus, found) = match pass(state, cfg, route)? {
        Ok(pair) => pair,
        Err((branches, best)) => {
            return Ok(ReductionResult::Failed {
                branches_tried: branches,
                best_residual: best,
            })
        }
    };
    let mut reduced = apply_glus(state, &glus)?;
    let mut graph = graph_from_state(&reduced)?;
    let mut residual = off_diagonal_residual(&graph);
    // rounding in long chains can leave residual correlations slightly above
    // tolerance; a second pass on the nearly diagonal state removes them
    for _ in 0..POLISH_PASSES {
        if residual.0 < cfg.tol * (1.0 + residual.1) {
            break;
        }
        let Ok((fix, _)) = pass(&reduced, cfg, route)? else {
            break;
        };
        let next_glus = glus.then(&fix)?;
        let next = apply_glus(state, &next_glus)?;
        let next_graph = graph_from_state(&next)?;
        let next_residual = off_diagonal_residual(&next_graph);
        if next_residual.0 >= residual.0 {
            break;
        }
        (glus, reduced, graph, residual) = (next_glus, next, next_graph, next_residual);
    }
    let (residual, diag) = residual;
    if !(residual < cfg.tol * (1.0 + diag)) {
        return Ok(ReductionResult::Failed {
            branches_tried: found.branches,
            best_residual: residual,
        });
    }
    let params = glus.params()?;
    Ok(ReductionResult::Success(ReductionSuccess {
        glus,
        params,
        state: reduced,
        graph,
        residual,
        branches_tried: found.branches,
        metadata: found.metadata,
    }))
}

/// Extra reduction passes allowed to clean up rounding.
const POLISH_PASSES: usize = 2;

type RouteFn = fn(&GaussianState, &ReduceConfig) -> Result<Attempt>;

/// One pass of self-loop removal, direction search and local normalisation.
#[allow(clippy::type_complexity)]
fn pass(
    state: &GaussianState,
    cfg: &ReduceConfig,
    route: RouteFn,
) -> Result<core::result::Result<(GluSet, Directions), (usize, f64)>> {
    let (shears, cleaned) = remove_self_loops(state)?;
    let found = match route(&cleaned, cfg)? {
        Attempt::Found(d) => d,
        Attempt::Exhausted { branches, best } => return Ok(Err((branches, best))),
    };
    let mut blocks = Vec::with_capacity(state.modes());
    for (j, dir) in found.dirs.iter().enumerate() {
        let local = iwasawa_compose(&local_form(dir, &cleaned.block(j, j)))?;
        blocks.push(local * shears.blocks()[j]);
    }
    Ok(Ok((GluSet::new(blocks)?, found)))
}

/// Largest off-diagonal `|U_jk|` and largest diagonal `|U_jj|`.
fn off_diagonal_residual(graph: &ComplexGraph) -> (f64, f64) {
    let n = graph.modes();
    let mut residual = 0.0_f64;
    let mut diag = 0.0_f64;
    for j in 0..n {
        diag = diag.max(graph.u[(j, j)].abs());
        for k in 0..n {
            if j != k {
                residual = residual.max(graph.u[(j, k)].abs());
            }
        }
    }
    (residual, diag)
}

pub(crate) fn metadata(route: Route, components: Vec<Vec<usize>>) -> ReductionMetadata {
    ReductionMetadata {
        route,
        components,
        clusters: 0,
        free_clusters: 0,
        closing_pairs: Vec::new(),
        fallback: false,
    }
}

pub(crate) fn chained(state: &GaussianState, cfg: &ReduceConfig) -> Attempt {
    let comps = search::components(&search::classify(state, cfg));
    let mut meta = metadata(Route::Chained, comps);
    match search::search(state, cfg) {
        SearchOutcome::Found {
            dirs,
            branches,
            stats,
        } => {
            meta.clusters = stats.clusters;
            meta.free_clusters = stats.free_clusters;
            meta.closing_pairs = stats.closing_pairs;
            Attempt::Found(Directions {
                dirs,
                branches,
                metadata: meta,
            })
        }
        SearchOutcome::Exhausted { branches, best } => Attempt::Exhausted { branches, best },
    }
}

fn two_mode(state: &GaussianState, cfg: &ReduceConfig) -> Attempt {
    let kinds = search::classify(state, cfg);
    let comps = search::components(&kinds);
    let e0 = Dir::new(1.0, 0.0);
    let first_row = |phi: f64| {
        let r = rotation(phi);
        Dir::new(r[(0, 0)], r[(0, 1)])
    };
    let sigma = state.block(0, 1);
    match kinds[0][1] {
        Kind::Zero => Attempt::Found(Directions {
            dirs: alloc::vec![e0, e0],
            branches: 1,
            metadata: metadata(Route::Trivial, comps),
        }),
        Kind::Regular => match left_standardize(&sigma) {
            Ok((p, _)) => Attempt::Found(Directions {
                dirs: alloc::vec![first_row(p.phi), e0],
                branches: 1,
                metadata: metadata(Route::TwoMode, comps),
            }),
            Err(_) => chained(state, cfg),
        },
        Kind::Singular => {
            let SingularAlignment::Branches(right) = singular_align(&sigma, Side::Right) else {
                return chained(state, cfg);
            };
            let mut best = f64::INFINITY;
            for (tried, p2) in right.iter().enumerate() {
                let aligned = sigma * rotation(p2.phi).transpose();
                let s1 = match singular_align(&aligned, Side::Left) {
                    SingularAlignment::Branches(left) => first_row(left[0].phi),
                    SingularAlignment::NoInformation => e0,
                };
                let dirs = alloc::vec![s1, first_row(p2.phi)];
                let worst = search::worst_correlation(state, &dirs);
                if worst <= cfg.branch_tol {
                    return Attempt::Found(Directions {
                        dirs,
                        branches: tried + 1,
                        metadata: metadata(Route::TwoMode, comps),
                    });
                }
                best = best.min(worst);
            }
            Attempt::Exhausted {
                branches: right.len(),
                best,
            }
        }
    }
}

fn route(state: &GaussianState, cfg: &ReduceConfig) -> Result<Attempt> {
    Ok(match state.modes() {
        0 => return Err(Error::InvalidDimension("state has no modes")),
        1 => Attempt::Found(Directions {
            dirs: alloc::vec![Dir::new(1.0, 0.0)],
            branches: 1,
            metadata: metadata(Route::Trivial, alloc::vec![alloc::vec![0]]),
        }),
        2 => two_mode(state, cfg),
        3 => three_mode::attempt(state, cfg),
        _ => chained(state, cfg),
    })
}

/// Finds GLUs that make `U` diagonal, or reports why none were found.
pub fn reduce(state: &GaussianState, cfg: &ReduceConfig) -> Result<ReductionResult> {
    reduce_with(state, cfg, route)
}

#[cfg(test)]
mod tests;
