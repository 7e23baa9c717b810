//! Regenerates the JSON fixtures under `fixtures/`.
//!
//! Run with `cargo run -p gaussgraph --example make_fixtures`. The flagged
//! four-mode state comes from a seeded random search and is frozen once written.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use gaussgraph::io::{self, CircuitFile, OpRecord};
use gaussgraph::sampling;
use gaussgraph_core::diagnostics::determinant_scale;
use gaussgraph_core::prelude::*;

const SIX_MODE_R: f64 = 0.5;

fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn diag(a: f64, b: f64) -> Mat2 {
    Mat2::new(a, 0.0, 0.0, b)
}

/// Fourier transform, a quarter turn in phase space.
fn fourier() -> Mat2 {
    Mat2::new(0.0, -1.0, 1.0, 0.0)
}

fn six_mode_graph(r: f64) -> ComplexGraph {
    let (t, ci) = ((2.0 * r).tanh(), 1.0 / (2.0 * r).cosh());
    let mut v = MatrixN::zeros(6, 6);
    for (a, b) in [(0, 2), (1, 2), (4, 5)] {
        v[(a, b)] = t;
        v[(b, a)] = t;
    }
    let mut u = MatrixN::identity(6, 6) * ci;
    for (a, b, w) in [(2, 3, -ci * t), (2, 4, ci * t * t), (3, 4, -ci * t)] {
        u[(a, b)] = w;
        u[(b, a)] = w;
    }
    ComplexGraph::new(v, u, 1e-12).unwrap()
}

/// Six-mode GLUs in the σ′ = SσSᵀ convention; they reveal the reference `V′`
/// and `U′` entrywise.
fn six_mode_glus(r: f64) -> GluSet {
    let c = (2.0 * r).cosh();
    let (out, inn) = (diag(c, 1.0 / c), diag(1.0 / c, c));
    GluSet::new(vec![out, out, inn, fourier() * inn, inn, out]).unwrap()
}

/// Squeezed modes joined by CZ gates into the revealed graph, followed by the
/// inverse of the six-mode GLUs.
fn six_mode_circuit(r: f64) -> CircuitFile {
    let (t, c) = ((2.0 * r).tanh(), (2.0 * r).cosh());
    let mut ops = Vec::new();
    // U′_jj = e^{−2 r_j}
    for (mode, power) in [(1, 3.0), (2, 3.0), (3, 1.0), (4, 1.0), (5, 1.0), (6, 3.0)] {
        ops.push(OpRecord::Squeeze {
            mode,
            r: 0.5 * power * c.ln(),
        });
    }
    for modes in [[1, 3], [2, 3], [3, 4], [4, 5], [5, 6]] {
        ops.push(OpRecord::Cz { modes, g: t });
    }
    for (j, b) in six_mode_glus(r).inverse().blocks().iter().enumerate() {
        ops.push(OpRecord::Local {
            mode: j + 1,
            matrix: [[b[(0, 0)], b[(0, 1)]], [b[(1, 0)], b[(1, 1)]]],
        });
    }
    CircuitFile { modes: 6, ops }
}

/// GLUs that reveal the two-mode squeezed state hidden in B(0, r1, r2).
fn btheta0_glus(r1: f64, r2: f64) -> GluSet {
    let rp = 0.5 * (r1 + r2);
    let s = diag((-rp).exp(), rp.exp());
    GluSet::new(vec![s, fourier() * s]).unwrap()
}

fn flagged_four_mode() -> GaussianState {
    let mut rng = sampling::rng(2024);
    loop {
        let s = sampling::random_state(&mut rng, 4);
        let v = sufficient_criterion(&s, 1e-10);
        if v.witnesses
            .iter()
            .any(|w| w.det > 1e-3 * determinant_scale(&s))
        {
            return s;
        }
    }
}

fn main() {
    let d = dir();
    std::fs::create_dir_all(&d).unwrap();
    let state = |name: &str, s: &GaussianState| io::write_state(&d.join(name), s).unwrap();

    state("btheta0.json", &build_btheta(0.0, 2.30, 1.65).unwrap());
    state(
        "btheta_pi2.json",
        &build_btheta(FRAC_PI_2, 1.2, 0.7).unwrap(),
    );
    state("epr.json", &two_mode_squeezed(1.0).unwrap());
    let cluster = [
        CircuitOp::Squeeze { mode: 0, r: 1.0 },
        CircuitOp::Squeeze { mode: 1, r: 1.0 },
        CircuitOp::Squeeze { mode: 2, r: 1.0 },
        CircuitOp::Cz { j: 0, k: 1, g: 1.0 },
        CircuitOp::Cz { j: 1, k: 2, g: 1.0 },
    ];
    state(
        "cz_cluster.json",
        &apply_circuit(&vacuum(3).unwrap(), &cluster).unwrap(),
    );
    state(
        "six_mode.json",
        &state_from_graph(&six_mode_graph(SIX_MODE_R)).unwrap(),
    );
    state("flagged_4mode.json", &flagged_four_mode());

    io::write_json(
        &d.join("six_mode_circuit.json"),
        &six_mode_circuit(SIX_MODE_R),
    )
    .unwrap();
    let squeeze = CircuitFile {
        modes: 1,
        ops: vec![OpRecord::Squeeze { mode: 1, r: 1.0 }],
    };
    io::write_json(&d.join("squeeze.json"), &squeeze).unwrap();
    io::write_glus(&d.join("six_mode_glus.json"), &six_mode_glus(SIX_MODE_R)).unwrap();
    io::write_glus(&d.join("btheta0_glus.json"), &btheta0_glus(2.30, 1.65)).unwrap();
    io::write_glus(
        &d.join("identity6_glus.json"),
        &GluSet::identity(6).unwrap(),
    )
    .unwrap();
    println!("fixtures written to {}", d.display());
}
