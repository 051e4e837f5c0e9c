//! Seeded random instances for sweeps and property checks.

use rand::Rng;

use crate::cost::CostFunction;
use crate::game::instances::parallel_links;
use crate::game::{Commodity, Edge, GameSpec, LoadState};

/// `a ~ logUniform(0.1, 10)`, `b ~ Uniform(0, 1)`.
pub fn random_affine_cost<R: Rng>(rng: &mut R) -> CostFunction {
    let a = 10f64.powf(rng.gen_range(-1.0..=1.0));
    let b = rng.gen_range(0.0..1.0);
    CostFunction::Affine { a, b }
}

/// Parallel-link game with 2 to 5 affine links and unit mass.
pub fn random_affine_rsg<R: Rng>(rng: &mut R) -> GameSpec {
    let m = rng.gen_range(2..=5);
    let costs = (0..m).map(|_| random_affine_cost(rng)).collect();
    parallel_links(costs, 1.0, 1.0).expect("generated costs are valid")
}

/// Affine game on nodes `s, a, b, t` with one unit of mass from `s` to `t`.
/// Each of the ten arcs not entering `s` or leaving `t` is present with
/// probability 1/2; `s -> a -> t` is always present.
pub fn random_affine_network<R: Rng>(rng: &mut R) -> GameSpec {
    let names = ["s", "a", "b", "t"];
    let mut edges = Vec::new();
    for from in 0..4 {
        for to in 0..4 {
            if from == to || to == 0 || from == 3 {
                continue;
            }
            let forced = (from == 0 && to == 1) || (from == 1 && to == 3);
            if forced || rng.gen_bool(0.5) {
                edges.push(Edge {
                    id: format!("{}{}", names[from], names[to]),
                    from,
                    to,
                    cost: random_affine_cost(rng),
                });
            }
        }
    }
    GameSpec::new(
        names.iter().map(|s| s.to_string()).collect(),
        edges,
        vec![Commodity { source: 0, target: 3, mass: 1.0, r: 1.0 }],
    )
    .expect("s -> a -> t is always present")
}

/// Arbitrary nonnegative loads, not necessarily derived from any flow.
pub fn random_load<R: Rng>(rng: &mut R, edges: usize) -> LoadState {
    LoadState::new((0..edges).map(|_| rng.gen_range(0.0..3.0)).collect()).expect("nonnegative")
}

/// Parallel-link affine game with two commodities (types) of total mass 1;
/// the second type has mass `n_k`.
pub fn random_two_type_rsg<R: Rng>(rng: &mut R, r_j: f64, r_k: f64, n_k: f64) -> GameSpec {
    let base = random_affine_rsg(rng);
    GameSpec::new(
        base.nodes().to_vec(),
        base.edges().to_vec(),
        vec![
            Commodity { source: 0, target: 1, mass: 1.0 - n_k, r: r_j },
            Commodity { source: 0, target: 1, mass: n_k, r: r_k },
        ],
    )
    .expect("valid two-type game")
}
