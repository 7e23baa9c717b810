use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::diagnostics::{correlation_determinants, ppt_symplectic_eigenvalues};
use crate::graph::state_from_graph;
use crate::linalg::max_abs;
use crate::state::testutil::*;
use crate::state::{apply_circuit, build_btheta, vacuum, CircuitOp};
use crate::symplectic::is_symplectic2;

fn cfg() -> ReduceConfig {
    ReduceConfig::default()
}

fn expect_success(state: &GaussianState) -> ReductionSuccess {
    match reduce(state, &cfg()).unwrap() {
        ReductionResult::Success(s) => s,
        other => panic!("expected success, got {other:?}"),
    }
}

fn off_diagonal_max(m: &crate::MatrixN) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..m.nrows() {
        for k in 0..m.ncols() {
            if j != k {
                worst = worst.max(m[(j, k)].abs());
            }
        }
    }
    worst
}

/// Soundness checks shared by every successful reduction.
fn check_sound(input: &GaussianState, out: &ReductionSuccess) {
    let diag = (0..input.modes())
        .map(|j| out.graph.u[(j, j)])
        .fold(0.0, f64::max);
    assert!(out.residual < 1e-8 * (1.0 + diag));
    assert!((off_diagonal_max(&out.graph.u) - out.residual).abs() < 1e-15);
    for b in out.glus.blocks() {
        assert!(is_symplectic2(b, 1e-9 * (1.0 + b.norm_squared())));
    }
    let before = correlation_determinants(input);
    let after = correlation_determinants(&out.state);
    let scale = 1.0 + input.scale() * input.scale();
    assert!(max_abs(&(before.0 - after.0)) < 1e-8 * scale);
    let again = apply_glus(input, &out.glus).unwrap();
    assert!(max_abs(&(again.sigma() - out.state.sigma())) < 1e-9 * (1.0 + input.scale()));
}

#[test]
fn six_mode_example_reveals_hidden_edges() {
    for r in [0.3, 0.8, 1.5] {
        let state = state_from_graph(&six_mode_graph(r)).unwrap();
        let out = expect_success(&state);
        check_sound(&state, &out);
        let v = &out.graph.v;
        let mut edges = Vec::new();
        for j in 0..6 {
            for k in (j + 1)..6 {
                if v[(j, k)].abs() > 1e-6 {
                    edges.push((j, k));
                }
            }
        }
        assert_eq!(edges, [(0, 2), (1, 2), (2, 3), (3, 4), (4, 5)]);
        // |V′_jk| / √(U′_jj U′_kk) is unchanged by the leftover local squeezing,
        // so it can be compared with the reference V′ = t, U′ = diag(c⁻³, c⁻³, c⁻¹, c⁻¹, c⁻¹, c⁻³)
        let (t, c) = ((2.0 * r).tanh(), (2.0 * r).cosh());
        let reference_u = [
            c.powi(-3),
            c.powi(-3),
            1.0 / c,
            1.0 / c,
            1.0 / c,
            c.powi(-3),
        ];
        for (j, k) in edges {
            let ours = v[(j, k)].abs() / (out.graph.u[(j, j)] * out.graph.u[(k, k)]).sqrt();
            let expected = t / (reference_u[j] * reference_u[k]).sqrt();
            assert!(
                (ours - expected).abs() < 1e-8 * expected,
                "({j},{k}) {ours} {expected}"
            );
        }
    }
}

#[test]
fn two_mode_hidden_entanglement() {
    for (r1, r2) in [(2.30, 1.65), (1.0, 0.2), (0.4, 1.3)] {
        let state = build_btheta(0.0, r1, r2).unwrap();
        let out = expect_success(&state);
        check_sound(&state, &out);
        let trace = out.graph.u[(0, 0)] + out.graph.u[(1, 1)];
        let want = 2.0 / (r1 - r2).cosh();
        assert!((trace - want).abs() < 1e-8 * want, "{trace} {want}");
        let before = ppt_symplectic_eigenvalues(&state, &[0]).unwrap();
        let after = ppt_symplectic_eigenvalues(&out.state, &[0]).unwrap();
        assert!((before[0] - after[0]).abs() < 1e-7);
        assert!((after[0] - 0.5 * (-(r1 - r2).abs()).exp()).abs() < 1e-9);
    }
}

#[test]
fn product_states_need_no_correlation_fix() {
    let ops = [
        CircuitOp::Squeeze { mode: 0, r: 0.7 },
        CircuitOp::Squeeze { mode: 1, r: -0.3 },
        CircuitOp::Rotate {
            mode: 2,
            theta: 0.4,
        },
        CircuitOp::Squeeze { mode: 2, r: 1.1 },
    ];
    let state = apply_circuit(&vacuum(3).unwrap(), &ops).unwrap();
    let out = expect_success(&state);
    assert!(max_abs(&out.graph.v) < 1e-12);
    assert_eq!(out.metadata.components, [[0], [1], [2]]);
    let out = expect_success(&vacuum(1).unwrap());
    assert_eq!(out.metadata.route, Route::Trivial);
}

#[test]
fn self_loops_are_removed() {
    let state = vacuum(2).unwrap();
    let (glus, same) = remove_self_loops(&state).unwrap();
    assert!(max_abs(&(glus.to_matrix() - crate::MatrixN::identity(4, 4))) < 1e-15);
    assert_eq!(same.sigma(), state.sigma());

    let ops = [
        CircuitOp::Squeeze { mode: 0, r: 0.5 },
        CircuitOp::Shear { mode: 0, q: 0.8 },
    ];
    let state = apply_circuit(&vacuum(1).unwrap(), &ops).unwrap();
    let (glus, _) = remove_self_loops(&state).unwrap();
    assert!((glus.blocks()[0][(1, 0)] + 0.8).abs() < 1e-12);

    let mut rng = rng(31);
    for _ in 0..50 {
        let state = state_from_graph(&random_cluster_graph(&mut rng, 4, 0.5)).unwrap();
        let (_, clean) = remove_self_loops(&state).unwrap();
        let g = graph_from_state(&clean).unwrap();
        for j in 0..4 {
            assert!(g.v[(j, j)].abs() < 1e-9);
        }
    }
}

#[test]
fn reduction_is_idempotent() {
    let mut rng = rng(5);
    for n in 2..6 {
        for _ in 0..10 {
            let g = random_cluster_graph(&mut rng, n, 0.6);
            let state =
                apply_glus(&state_from_graph(&g).unwrap(), &random_glus(&mut rng, n)).unwrap();
            let first = expect_success(&state);
            let second = expect_success(&first.state);
            let id = crate::MatrixN::identity(2 * n, 2 * n);
            assert!(
                max_abs(&(second.glus.to_matrix() - id)) < 1e-6,
                "{:?}",
                second.params
            );
            assert!(
                max_abs(&(second.graph.u - &first.graph.u))
                    < 1e-8 * (1.0 + max_abs(&first.graph.u))
            );
        }
    }
}

#[test]
fn scrambled_cluster_states_are_recovered() {
    let mut rng = rng(11);
    for n in 2..9 {
        for density in [0.25, 0.5, 0.9] {
            for _ in 0..8 {
                let g = random_cluster_graph(&mut rng, n, density);
                let state =
                    apply_glus(&state_from_graph(&g).unwrap(), &random_glus(&mut rng, n)).unwrap();
                let out = expect_success(&state);
                check_sound(&state, &out);
                // real edges reappear exactly where the hidden graph had them
                for j in 0..n {
                    for k in (j + 1)..n {
                        let present = g.v[(j, k)] != 0.0;
                        assert_eq!(out.graph.v[(j, k)].abs() > 1e-6, present, "n={n} ({j},{k})");
                    }
                }
            }
        }
    }
}

#[test]
fn edge_pattern_follows_determinants() {
    let mut rng = rng(17);
    let mut seen = 0;
    for n in [2usize, 3] {
        for _ in 0..200 {
            let state = random_state(&mut rng, n);
            let Ok(ReductionResult::Success(out)) = reduce(&state, &cfg()) else {
                continue;
            };
            seen += 1;
            let dets = correlation_determinants(&state);
            let scale = state.scale() * state.scale();
            for j in 0..n {
                for k in (j + 1)..n {
                    let d = dets.get(j, k);
                    if d < -1e-6 * scale {
                        assert!(out.graph.v[(j, k)].abs() > 1e-9);
                    } else if d.abs() < 1e-14 * scale {
                        assert!(out.graph.v[(j, k)].abs() < 1e-5);
                    }
                }
            }
        }
    }
    assert!(seen > 300);
}

#[test]
fn two_mode_completeness() {
    let mut rng = rng(23);
    for _ in 0..1000 {
        let state = random_state(&mut rng, 2);
        let out = expect_success(&state);
        check_sound(&state, &out);
    }
}

#[test]
fn three_mode_completeness() {
    let mut rng = rng(29);
    let (mut reduced, mut flagged) = (0, 0);
    while reduced < 300 {
        let state = random_state(&mut rng, 3);
        match reduce(&state, &cfg()).unwrap() {
            ReductionResult::Success(out) => {
                check_sound(&state, &out);
                reduced += 1;
            }
            ReductionResult::Irreducible(v) => {
                assert!(v.flagged);
                flagged += 1;
            }
            ReductionResult::Failed { best_residual, .. } => panic!("failed with {best_residual}"),
        }
    }
    assert!(flagged > 0);
}

#[test]
fn three_mode_construction_is_used() {
    let mut rng = rng(37);
    let mut direct = 0;
    for _ in 0..100 {
        let g = random_cluster_graph(&mut rng, 3, 1.0);
        let state = apply_glus(&state_from_graph(&g).unwrap(), &random_glus(&mut rng, 3)).unwrap();
        let out = match three_mode_reduce(&state, &cfg()).unwrap() {
            ReductionResult::Success(s) => s,
            other => panic!("{other:?}"),
        };
        check_sound(&state, &out);
        if out.metadata.route == Route::ThreeMode {
            direct += 1;
        }
    }
    assert!(direct > 90, "{direct}");
    assert!(three_mode_reduce(&vacuum(2).unwrap(), &cfg()).is_err());
}

#[test]
fn flagged_states_are_irreducible() {
    let mut rng = rng(41);
    let mut found = 0;
    for _ in 0..200 {
        let state = random_state(&mut rng, 4);
        let verdict = crate::diagnostics::sufficient_criterion(&state, cfg().criterion_threshold);
        let result = reduce(&state, &cfg()).unwrap();
        if verdict.flagged {
            found += 1;
            assert_eq!(result, ReductionResult::Irreducible(verdict));
        } else {
            assert!(!matches!(result, ReductionResult::Irreducible(_)));
        }
    }
    assert!(found > 0);
}

#[test]
fn entanglement_is_preserved() {
    let mut rng = rng(43);
    for n in 2..6 {
        for _ in 0..5 {
            let g = random_cluster_graph(&mut rng, n, 0.6);
            let state =
                apply_glus(&state_from_graph(&g).unwrap(), &random_glus(&mut rng, n)).unwrap();
            let out = expect_success(&state);
            for mask in 1..(1u32 << n) - 1 {
                let party: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
                let a = ppt_symplectic_eigenvalues(&state, &party).unwrap();
                let b = ppt_symplectic_eigenvalues(&out.state, &party).unwrap();
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-7, "{x} {y}");
                }
            }
        }
    }
}

#[test]
fn chained_first_rows_match_closed_forms() {
    let mut rng = rng(47);
    let j = Mat2::new(0.0, 1.0, -1.0, 0.0);
    let mut checked = 0;
    while checked < 200 {
        let s = random_state(&mut rng, 3);
        let (s12, s13) = (s.block(0, 1), s.block(0, 2));
        if s12.determinant() > -1e-3 || s13.determinant() > -1e-3 {
            continue;
        }
        let phi2 = rng_angle(&mut rng);
        let r2 = 0.7;
        let s2 = iwasawa_compose(&IwasawaParams {
            q: 0.0,
            r: r2,
            phi: phi2,
        })
        .unwrap();
        let s1 = chain_s1_of_s2(&s12, phi2, r2).unwrap();
        let s3 = chain_sj_of_s2(&s12, &s13, phi2, r2).unwrap();
        let row = |m: &Mat2| Dir::new(m[(0, 0)], m[(0, 1)]);
        let e1 = j * s12 * row(&s2);
        let e3 = j * s13.transpose() * row(&s1);
        let cross = |a: &Dir, b: &Dir| (a[0] * b[1] - a[1] * b[0]) / (a.norm() * b.norm());
        assert!(cross(&e1, &row(&s1)).abs() < 1e-9);
        assert!(cross(&e3, &row(&s3)).abs() < 1e-9);
        checked += 1;
    }
}

fn rng_angle(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    use rand::Rng;
    rng.random_range(-3.0..3.0)
}

#[test]
fn config_defaults() {
    let c = ReduceConfig::default();
    assert_eq!(
        (c.tol, c.singular_threshold, c.max_branches),
        (1e-8, 1e-10, 4096)
    );
}

#[test]
fn branch_budget_is_respected() {
    let mut rng = rng(53);
    let tight = ReduceConfig {
        max_branches: 1,
        ..cfg()
    };
    for _ in 0..100 {
        let state = random_state(&mut rng, 5);
        if let ReductionResult::Failed { branches_tried, .. } = reduce(&state, &tight).unwrap() {
            assert!(branches_tried <= 2, "{branches_tried}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn glu_orbit_reduces_to_same_invariants(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = rng(seed);
        let g = random_cluster_graph(&mut rng, n, 0.5);
        let base = state_from_graph(&g).unwrap();
        let state = apply_glus(&base, &random_glus(&mut rng, n)).unwrap();
        let out = reduce(&state, &cfg()).unwrap();
        let out = out.success().expect("success");
        prop_assert!(out.residual < 1e-8 * (1.0 + max_abs(&out.graph.u)));
        let d0 = correlation_determinants(&base);
        let d1 = correlation_determinants(&out.state);
        prop_assert!(max_abs(&(d0.0 - d1.0)) < 1e-8 * (1.0 + base.scale() * base.scale()));
    }

    #[test]
    fn success_excludes_flag(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = rng(seed);
        let state = random_state(&mut rng, n);
        let flagged = crate::diagnostics::sufficient_criterion(&state, cfg().criterion_threshold).flagged;
        let result = reduce(&state, &cfg()).unwrap();
        prop_assert_eq!(flagged, matches!(result, ReductionResult::Irreducible(_)));
    }
}
