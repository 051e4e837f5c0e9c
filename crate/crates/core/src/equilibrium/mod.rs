//! Equilibrium computation and certificates.
//!
//! * homogeneous WCC: potential minimization by a path-based conditional
//!   gradient method ([`solve_wcc_homogeneous`]) or, on affine parallel
//!   links, exact water-filling ([`solve_rsg_wcc_active_set`]);
//! * heterogeneous WCC: block best-response dynamics
//!   ([`best_response_dynamics`]);
//! * WCR on resource selection games: max-regret descent
//!   ([`solve_wcr_rsg`]).

mod active_set;
mod dynamics;
mod frank_wolfe;
mod rconvex;
mod wcr;

pub use active_set::solve_rsg_wcc_active_set;
pub use dynamics::{
    best_response_dynamics, best_response_dynamics_from, verify_wcc_equilibrium, DynamicsConfig,
    MoveRule, Termination,
};
pub use frank_wolfe::{solve_optimum, solve_wcc_homogeneous, FwOptions, StartRule};
pub use rconvex::{default_grid, is_r_convex, is_r_convex_by};
pub use wcr::{
    apply_move, solve_wcr_rsg, verify_wcr_equilibrium, wcr_descent_move, MoveProposal, WcrCase,
    WcrOptions,
};

use crate::game::{FlowState, GameSpec, LoadState, Path};

#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    pub flow: FlowState,
    pub load: LoadState,
    /// Nonnegative certificate: the conditional-gradient gap for WCC solvers,
    /// the max-minus-min regret spread for WCR.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value per iteration (potential or max regret).
    pub history: Vec<f64>,
}

/// Outcome of an equilibrium check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    pub ok: bool,
    /// Largest amount by which a used option is worse than the best one.
    pub worst_violation: f64,
}

/// One move of best-response dynamics.
#[derive(Debug, Clone)]
pub struct TraceStep {
    pub commodity: usize,
    pub from: Path,
    pub to: Path,
    pub mass: f64,
    pub load: LoadState,
    /// Potential after the move (see [`best_response_dynamics`]).
    pub metric: f64,
}

#[derive(Debug, Clone)]
pub struct DynamicsTrace {
    pub start: FlowState,
    pub steps: Vec<TraceStep>,
    pub final_flow: FlowState,
    pub termination: Termination,
}

impl DynamicsTrace {
    pub fn final_load(&self, spec: &GameSpec) -> LoadState {
        spec.aggregate(&self.final_flow)
    }
}

/// Costs of each path under the loads, with commodity-specific scaling.
pub(crate) fn path_costs(spec: &GameSpec, r: f64, paths: &[Path], load: &LoadState) -> Vec<f64> {
    let edges = spec.edges();
    paths
        .iter()
        .map(|p| p.edges().iter().map(|&e| edges[e].cost.eval(r * load.get(e))).sum())
        .collect()
}

/// `sum_i sum_f s_f (c_f - min_f' c_f')`, the conditional-gradient gap of
/// the potential of the game with per-commodity scaling `rvec`.
pub(crate) fn wcc_gap(
    spec: &GameSpec,
    rvec: &[f64],
    paths: &[Vec<Path>],
    flow: &FlowState,
    load: &LoadState,
) -> f64 {
    let mut gap = 0.0;
    for (i, ps) in paths.iter().enumerate() {
        let costs = path_costs(spec, rvec[i], ps, load);
        let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
        for (p, c) in ps.iter().zip(&costs) {
            gap += flow.mass_on(i, p) * (c - best);
        }
    }
    gap.max(0.0)
}

/// Splits per-edge loads of an RSG across its commodities in proportion to
/// their masses.
pub(crate) fn rsg_flow(spec: &GameSpec, load: &LoadState) -> FlowState {
    let n = spec.total_mass();
    FlowState::new(
        spec.commodities()
            .iter()
            .map(|c| {
                (0..spec.edge_count())
                    .filter(|&e| load.get(e) > 0.0)
                    .map(|e| (Path(vec![e]), load.get(e) * c.mass / n))
                    .collect()
            })
            .collect(),
    )
}
