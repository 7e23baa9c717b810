//! Seeded random circuits, states and local operations.

use gaussgraph_core::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random gates: squeezing `r ∈ [−1, 1]`, rotations, shears `q ∈ [−1, 1]`,
/// balanced beamsplitters and CZ gates `g ∈ [−1, 1]` (0-based modes).
pub fn random_circuit(rng: &mut impl Rng, n: usize, depth: usize) -> Vec<CircuitOp> {
    (0..depth)
        .map(|_| {
            let j = rng.random_range(0..n);
            let k = if n > 1 {
                (j + 1 + rng.random_range(0..n - 1)) % n
            } else {
                j
            };
            match rng.random_range(0..if n > 1 { 5 } else { 3 }) {
                0 => CircuitOp::Squeeze {
                    mode: j,
                    r: rng.random_range(-1.0..1.0),
                },
                1 => CircuitOp::Rotate {
                    mode: j,
                    theta: rng.random_range(0.0..std::f64::consts::TAU),
                },
                2 => CircuitOp::Shear {
                    mode: j,
                    q: rng.random_range(-1.0..1.0),
                },
                3 => CircuitOp::BalancedBeamsplitter { j, k },
                _ => CircuitOp::Cz {
                    j,
                    k,
                    g: rng.random_range(-1.0..1.0),
                },
            }
        })
        .collect()
}

/// Vacuum evolved by a depth-20 random circuit.
pub fn random_state(rng: &mut impl Rng, n: usize) -> GaussianState {
    apply_circuit(&vacuum(n).expect("n ≥ 1"), &random_circuit(rng, n, 20)).expect("valid gates")
}

pub fn random_glus(rng: &mut impl Rng, n: usize) -> GluSet {
    let params: Vec<IwasawaParams> = (0..n)
        .map(|_| IwasawaParams {
            q: rng.random_range(-1.5..1.5),
            r: rng.random_range(-1.0_f64..1.0).exp(),
            phi: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        })
        .collect();
    GluSet::from_params(&params).expect("valid parameters")
}
