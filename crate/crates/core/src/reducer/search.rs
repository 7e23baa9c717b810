//! Branch search over the free rotation angles.
//!
//! Only the first row `s_j` of each GLU enters `⟨Q'_j Q'_k⟩ = s_jᵀ σ_jk s_k`,
//! and only its direction matters. A block with nonzero determinant fixes
//! `s_k` from `s_j` (`s_k ∝ J σ_jkᵀ s_j`, `J(x, y) = (y, −x)`), which is the
//! first-row content of the chained `S_j[S₂]`. Modes linked by such blocks
//! form a rigid cluster with one free angle `φ` (the pivot mode's rotation).
//! Every other nonzero block inside a cluster gives an equation
//! `A cos 2φ + B sin 2φ + C = 0`; a rank-one block `a bᵀ` between clusters is
//! satisfied when one side is orthogonal to `a` or `b` respectively.

use alloc::vec::Vec;

use nalgebra::Vector2;
#[allow(unused_imports)]
use num_traits::Float;

use super::chain::solve_final_phase;
use super::ReduceConfig;
use crate::linalg::{max_abs, Mat2};
use crate::state::GaussianState;

pub(crate) type Dir = Vector2<f64>;

/// Blocks with all entries below this fraction of `max |σ|` are treated as zero.
pub(crate) const ZERO_BLOCK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    Zero,
    Singular,
    Regular,
}

pub(crate) fn classify(state: &GaussianState, cfg: &ReduceConfig) -> Vec<Vec<Kind>> {
    let n = state.modes();
    let floor = ZERO_BLOCK * max_abs(state.sigma());
    let mut kinds = alloc::vec![alloc::vec![Kind::Zero; n]; n];
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let b = state.block(j, k);
            kinds[j][k] = if b.abs().max() <= floor {
                Kind::Zero
            } else if b.determinant().abs() <= cfg.singular_threshold * b.norm_squared() {
                Kind::Singular
            } else {
                Kind::Regular
            };
        }
    }
    kinds
}

/// `|s_jᵀ σ_jk s_k|` normalised by the two single-mode `Q` variances.
pub(crate) fn correlation(state: &GaussianState, j: usize, k: usize, sj: &Dir, sk: &Dir) -> f64 {
    let num = (sj.transpose() * state.block(j, k) * sk)[(0, 0)];
    let vj = (sj.transpose() * state.block(j, j) * sj)[(0, 0)];
    let vk = (sk.transpose() * state.block(k, k) * sk)[(0, 0)];
    num.abs() / (vj * vk).sqrt()
}

/// Largest normalised `QQ` correlation over all mode pairs.
pub(crate) fn worst_correlation(state: &GaussianState, dirs: &[Dir]) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..dirs.len() {
        for k in (j + 1)..dirs.len() {
            worst = worst.max(correlation(state, j, k, &dirs[j], &dirs[k]));
        }
    }
    worst
}

pub(crate) fn direction(phi: f64) -> Dir {
    let (s, c) = phi.sin_cos();
    Dir::new(c, s)
}

fn perp_angle(x: &Dir) -> f64 {
    // w ⊥ x  ⇔  w ∝ (−x₁, x₀)
    let pi = core::f64::consts::PI;
    let a = (x[0]).atan2(-x[1]);
    let a = if a < 0.0 { a + pi } else { a };
    if a >= pi {
        a - pi
    } else {
        a
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
    /// Groups in order of their smallest member, members ascending.
    fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut index = alloc::vec![usize::MAX; n];
        for x in 0..n {
            let r = self.find(x);
            if index[r] == usize::MAX {
                index[r] = out.len();
                out.push(Vec::new());
            }
            out[index[r]].push(x);
        }
        out
    }
}

/// Modes grouped by nonzero correlation blocks.
pub(crate) fn components(kinds: &[Vec<Kind>]) -> Vec<Vec<usize>> {
    let n = kinds.len();
    let mut uf = UnionFind::new(n);
    for j in 0..n {
        for k in (j + 1)..n {
            if kinds[j][k] != Kind::Zero {
                uf.union(j, k);
            }
        }
    }
    uf.groups()
}

/// Rank-one factors `σ ≈ a bᵀ`: the dominant column and row directions.
fn rank_one_factors(m: &Mat2) -> (Dir, Dir) {
    let col = if m.column(0).norm() >= m.column(1).norm() {
        m.column(0)
    } else {
        m.column(1)
    };
    let row = if m.row(0).norm() >= m.row(1).norm() {
        m.row(0)
    } else {
        m.row(1)
    };
    (Dir::new(col[0], col[1]), Dir::new(row[0], row[1]))
}

#[derive(Debug, Clone, Default)]
pub(crate) struct SearchStats {
    pub clusters: usize,
    pub free_clusters: usize,
    pub closing_pairs: Vec<(usize, usize)>,
}

pub(crate) enum SearchOutcome {
    Found {
        dirs: Vec<Dir>,
        branches: usize,
        stats: SearchStats,
    },
    Exhausted {
        branches: usize,
        best: f64,
    },
}

enum Constraint {
    /// `wᵀ K w = 0` inside one cluster.
    Closing {
        pair: (usize, usize),
        a: f64,
        b: f64,
        c: f64,
    },
    /// `w_left ⊥ x` or `w_right ⊥ y` across two clusters.
    Split {
        left: usize,
        right: usize,
        x: Dir,
        y: Dir,
    },
}

/// Searches all components of the state for first-row directions that
/// cancel every `⟨Q_j Q_k⟩`.
pub(crate) fn search(state: &GaussianState, cfg: &ReduceConfig) -> SearchOutcome {
    let n = state.modes();
    let kinds = classify(state, cfg);
    let mut dirs = alloc::vec![Dir::new(1.0, 0.0); n];
    let mut stats = SearchStats::default();
    let mut branches = 0usize;
    let mut failed: Option<f64> = None;
    for comp in components(&kinds) {
        if comp.len() == 1 {
            continue;
        }
        let budget = cfg.max_branches.saturating_sub(branches).max(1);
        match search_component(state, &kinds, &comp, budget, cfg, &mut stats) {
            Ok((found, used)) => {
                branches += used;
                for (m, d) in comp.iter().zip(found) {
                    dirs[*m] = d;
                }
            }
            Err((used, best)) => {
                branches += used;
                failed = Some(failed.unwrap_or(0.0).max(best));
            }
        }
    }
    match failed {
        None => SearchOutcome::Found {
            dirs,
            branches,
            stats,
        },
        Some(best) => SearchOutcome::Exhausted { branches, best },
    }
}

#[allow(clippy::type_complexity)]
fn search_component(
    state: &GaussianState,
    kinds: &[Vec<Kind>],
    comp: &[usize],
    budget: usize,
    cfg: &ReduceConfig,
    stats: &mut SearchStats,
) -> core::result::Result<(Vec<Dir>, usize), (usize, f64)> {
    let size = comp.len();
    let kind = |a: usize, b: usize| kinds[comp[a]][comp[b]];
    let block = |a: usize, b: usize| state.block(comp[a], comp[b]);

    // rigid clusters
    let mut uf = UnionFind::new(size);
    for a in 0..size {
        for b in (a + 1)..size {
            if kind(a, b) == Kind::Regular {
                uf.union(a, b);
            }
        }
    }
    let clusters = uf.groups();
    let mut cluster_of = alloc::vec![0usize; size];
    for (ci, c) in clusters.iter().enumerate() {
        for &a in c {
            cluster_of[a] = ci;
        }
    }
    stats.clusters += clusters.len();

    // first-row maps s_a = L_a w, built along a spanning tree of each cluster
    let flip = Mat2::new(1.0, 0.0, 0.0, -1.0);
    let jmat = Mat2::new(0.0, 1.0, -1.0, 0.0);
    let mut l = alloc::vec![flip; size];
    let mut tree = alloc::vec![alloc::vec![false; size]; size];
    for c in &clusters {
        if c.len() == 1 {
            continue;
        }
        let (i, k) = if kind(c[0], c[1]) == Kind::Regular {
            (c[0], c[1])
        } else {
            let mut best = (c[0], c[1], f64::INFINITY);
            for (x, &a) in c.iter().enumerate() {
                for &b in &c[x + 1..] {
                    let det = block(a, b).determinant();
                    if kind(a, b) == Kind::Regular && det < best.2 {
                        best = (a, b, det);
                    }
                }
            }
            (best.0, best.1)
        };
        let mut seen = alloc::vec![false; size];
        seen[k] = true;
        let step = |from: usize, to: usize, lf: &Mat2| {
            let sig = block(from, to);
            let delta = sig.determinant().abs().sqrt();
            jmat * sig.transpose() * lf / delta
        };
        l[i] = step(k, i, &l[k]);
        seen[i] = true;
        tree[i][k] = true;
        tree[k][i] = true;
        // grow the tree through the best-conditioned blocks first, since each
        // step divides by δ and amplifies rounding in nearly singular blocks
        let quality = |a: usize, b: usize| {
            let m = block(a, b);
            m.determinant().abs() / m.norm_squared()
        };
        let mut inside = alloc::vec![i, k];
        while inside.len() < c.len() {
            let mut best: Option<(usize, usize, f64)> = None;
            for &p in &inside {
                for &j in c {
                    if !seen[j] && kind(p, j) == Kind::Regular {
                        let w = quality(p, j);
                        if best.is_none_or(|b| w > b.2) {
                            best = Some((p, j, w));
                        }
                    }
                }
            }
            let Some((p, j, _)) = best else { break };
            l[j] = step(p, j, &l[p]);
            seen[j] = true;
            tree[p][j] = true;
            tree[j][p] = true;
            inside.push(j);
        }
    }

    // constraints from every remaining nonzero block
    let mut constraints = Vec::new();
    for a in 0..size {
        for b in (a + 1)..size {
            if kind(a, b) == Kind::Zero || tree[a][b] {
                continue;
            }
            let sig = block(a, b);
            if cluster_of[a] == cluster_of[b] {
                let k = l[a].transpose() * sig * l[b];
                let (p, q, s) = (k[(0, 0)], 0.5 * (k[(0, 1)] + k[(1, 0)]), k[(1, 1)]);
                let scale = l[a].norm() * sig.norm() * l[b].norm();
                if p.abs().max(q.abs()).max(s.abs()) <= 1e-10 * scale {
                    continue;
                }
                constraints.push(Constraint::Closing {
                    pair: (comp[a], comp[b]),
                    a: 0.5 * (p - s),
                    b: q,
                    c: 0.5 * (p + s),
                });
            } else {
                let (x, y) = rank_one_factors(&sig);
                constraints.push(Constraint::Split {
                    left: a,
                    right: b,
                    x: l[a].transpose() * x,
                    y: l[b].transpose() * y,
                });
            }
        }
    }

    // candidate angles per cluster
    let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(clusters.len());
    for ci in 0..clusters.len() {
        // among this cluster's closing equations, take the one whose roots are
        // best separated; a double root is only resolved to about √ε
        let mut closing: Option<((usize, usize), f64, f64, f64)> = None;
        let mut separation = f64::NEG_INFINITY;
        for con in &constraints {
            if let Constraint::Closing { pair, a, b, c } = con {
                let owner = comp.iter().position(|m| *m == pair.0).unwrap();
                if cluster_of[owner] != ci {
                    continue;
                }
                let amp = a * a + b * b;
                let sep = if amp > 0.0 { (amp - c * c) / amp } else { -1.0 };
                if sep > separation + 1e-12 {
                    separation = sep;
                    closing = Some((*pair, *a, *b, *c));
                }
            }
        }
        let list = if let Some((pair, a, b, c)) = closing {
            stats.closing_pairs.push(pair);
            solve_final_phase(a, b, c)
        } else {
            stats.free_clusters += 1;
            let mut list = alloc::vec![0.0];
            for c in &constraints {
                if let Constraint::Split { left, right, x, y } = c {
                    if cluster_of[*left] == ci {
                        list.push(perp_angle(x));
                    }
                    if cluster_of[*right] == ci {
                        list.push(perp_angle(y));
                    }
                }
            }
            list.sort_by(|x, y| x.total_cmp(y));
            list.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
            list
        };
        if list.is_empty() {
            return Err((0, f64::INFINITY));
        }
        candidates.push(list);
    }

    // enumerate the product of candidates, first cluster varying slowest
    let mut index = alloc::vec![0usize; clusters.len()];
    let mut tried = 0usize;
    let mut best = f64::INFINITY;
    loop {
        if tried >= budget {
            return Err((tried, best));
        }
        tried += 1;
        let dirs: Vec<Dir> = (0..size)
            .map(|a| {
                let s = l[a] * direction(candidates[cluster_of[a]][index[cluster_of[a]]]);
                s / s.norm()
            })
            .collect();
        let mut worst = 0.0_f64;
        for a in 0..size {
            for b in (a + 1)..size {
                if kind(a, b) != Kind::Zero {
                    worst = worst.max(correlation(state, comp[a], comp[b], &dirs[a], &dirs[b]));
                }
            }
        }
        if worst <= cfg.branch_tol {
            return Ok((dirs, tried));
        }
        best = best.min(worst);
        // advance mixed-radix counter (last cluster fastest)
        let mut pos = clusters.len();
        loop {
            if pos == 0 {
                return Err((tried, best));
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < candidates[pos].len() {
                break;
            }
            index[pos] = 0;
        }
    }
}
