//! Shared fixtures for the benchmarks.

use gitstar_core::heuristics::PotentialField;
use gitstar_core::{generate_scenario, ApfConfig, EdgeContext, ProblemInstance, ScenarioKind, ScenarioParams, StateVec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn scenario(kind: ScenarioKind, dim: usize) -> ProblemInstance {
    generate_scenario(kind, dim, 1, &ScenarioParams::default()).expect("benchmark scenarios generate")
}

/// `n` uniform states in the unit cube.
pub fn random_states(dim: usize, n: usize, seed: u64) -> Vec<StateVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StateVec::new((0..dim).map(|_| rng.gen()).collect())).collect()
}

/// A field over `n` random invalid samples, anchored at the cube center.
pub fn field(dim: usize, n: usize) -> PotentialField {
    let obstacles = random_states(dim, n, 7);
    PotentialField::build(dim, obstacles.iter(), StateVec::splat(dim, 0.5), ApfConfig::default())
}

/// A context with every terminal away from zero.
pub fn context() -> EdgeContext {
    EdgeContext {
        g_hat_t: 0.7,
        h_hat_t: 0.4,
        c_hat: 0.05,
        e_bar_s: 120.0,
        e_bar_edge: 25.0,
        d_bar_t: 180.0,
        dim: 4.0,
        u_s: 0.8,
        u_t: 1.1,
        w_dyn: 12.0,
        n_samples: 900.0,
    }
}
