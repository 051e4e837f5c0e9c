use std::collections::BTreeMap;

use super::{path_costs, wcc_gap, EquilibriumResult};
use crate::error::{Error, Result};
use crate::game::{FlowState, GameSpec, LoadState, Path};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartRule {
    /// Each commodity on its cheapest path at zero load.
    AllOrNothing,
    /// Each commodity spread evenly over its paths.
    Uniform,
}

#[derive(Debug, Clone, Copy)]
pub struct FwOptions {
    /// Stop once the gap is at most `tol * max(1, potential)`.
    pub tol: f64,
    pub max_iterations: usize,
    pub start: StartRule,
}

impl Default for FwOptions {
    fn default() -> Self {
        FwOptions { tol: 1e-7, max_iterations: 100_000, start: StartRule::AllOrNothing }
    }
}

/// Equilibrium of the game with costs `c_e(r t)` for every commodity, as the
/// minimizer of its potential over the product of flow polytopes.
///
/// Pairwise conditional gradient: per commodity, mass moves from the
/// costliest used path to the cheapest path (the shortest-path linear
/// oracle) with an exact line search. The potential never increases.
/// Running out of iterations is not an error; the best iterate comes back
/// with `converged = false`.
pub fn solve_wcc_homogeneous(spec: &GameSpec, r: f64, opts: FwOptions) -> Result<EquilibriumResult> {
    if !(r >= 1.0) {
        return Err(Error::OutOfRange { what: "r", value: r });
    }
    spec.require_differentiable()?;
    let paths = spec.all_paths()?;
    let rvec = vec![r; paths.len()];

    let mut flow = initial_flow(spec, r, &paths, opts.start);
    let mut load = spec.aggregate(&flow);
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let phi = spec.potential_r(&load, r)?;
        let gap = wcc_gap(spec, &rvec, &paths, &flow, &load);
        history.push(phi);
        if gap <= opts.tol * phi.max(1.0) {
            return Ok(EquilibriumResult { flow, load, gap, iterations, converged: true, history });
        }
        if iterations >= opts.max_iterations {
            return Ok(EquilibriumResult { flow, load, gap, iterations, converged: false, history });
        }
        iterations += 1;
        for (i, ps) in paths.iter().enumerate() {
            let costs = path_costs(spec, r, ps, &load);
            let Some((away, _)) = ps
                .iter()
                .zip(&costs)
                .filter(|(p, _)| flow.mass_on(i, p) > 0.0)
                .max_by(|a, b| a.1.total_cmp(b.1))
            else {
                continue;
            };
            let (toward, _) = ps
                .iter()
                .zip(&costs)
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("commodity has paths");
            if away == toward {
                continue;
            }
            let available = flow.mass_on(i, away);
            let step = line_search(spec, r, &load, away, toward, available);
            if step <= 0.0 {
                continue;
            }
            let (away, toward) = (away.clone(), toward.clone());
            apply_shift(&mut flow, &mut load, i, &away, &toward, step, available);
        }
    }
}

/// Social optimum: the equilibrium of the taxation-modified game.
pub fn solve_optimum(spec: &GameSpec, opts: FwOptions) -> Result<EquilibriumResult> {
    let modified = spec.taxation_modified_game()?;
    solve_wcc_homogeneous(&modified, 1.0, opts)
}

fn initial_flow(spec: &GameSpec, r: f64, paths: &[Vec<Path>], start: StartRule) -> FlowState {
    let zero = LoadState::zeros(spec.edge_count());
    FlowState::new(
        paths
            .iter()
            .zip(spec.commodities())
            .map(|(ps, c)| match start {
                StartRule::AllOrNothing => {
                    let costs = path_costs(spec, r, ps, &zero);
                    let k = (0..ps.len())
                        .min_by(|&a, &b| costs[a].total_cmp(&costs[b]))
                        .expect("commodity has paths");
                    BTreeMap::from([(ps[k].clone(), c.mass)])
                }
                StartRule::Uniform => {
                    let share = c.mass / ps.len() as f64;
                    ps.iter().map(|p| (p.clone(), share)).collect()
                }
            })
            .collect(),
    )
}

fn apply_shift(
    flow: &mut FlowState,
    load: &mut LoadState,
    i: usize,
    from: &Path,
    to: &Path,
    step: f64,
    available: f64,
) {
    // Moving everything: remove the entry outright so no float residue stays.
    let step = if step >= available { available } else { step };
    flow.shift(i, from, to, step);
    for &e in from.edges().iter().filter(|e| !to.contains(**e)) {
        load.add(e, -step);
    }
    for &e in to.edges().iter().filter(|e| !from.contains(**e)) {
        load.add(e, step);
    }
}

/// Minimizer over `[0, max]` of the potential along the pairwise direction.
/// The directional derivative is nondecreasing in the step, so its root is
/// found in closed form for affine costs and by bisection otherwise.
pub(crate) fn line_search(
    spec: &GameSpec,
    r: f64,
    load: &LoadState,
    from: &Path,
    to: &Path,
    max: f64,
) -> f64 {
    let edges = spec.edges();
    let gains: Vec<usize> = to.edges().iter().copied().filter(|e| !from.contains(*e)).collect();
    let losses: Vec<usize> = from.edges().iter().copied().filter(|e| !to.contains(*e)).collect();
    let slope = |delta: f64| -> f64 {
        gains.iter().map(|&e| edges[e].cost.eval(r * (load.get(e) + delta))).sum::<f64>()
            - losses
                .iter()
                .map(|&e| edges[e].cost.eval(r * (load.get(e) - delta).max(0.0)))
                .sum::<f64>()
    };
    let g0 = slope(0.0);
    if g0 >= 0.0 {
        return 0.0;
    }
    if slope(max) <= 0.0 {
        return max;
    }
    let affine: Option<f64> = gains
        .iter()
        .chain(&losses)
        .map(|&e| edges[e].cost.as_affine().map(|(a, _)| a))
        .sum();
    if let Some(total_a) = affine {
        if total_a > 0.0 {
            return (-g0 / (r * total_a)).clamp(0.0, max);
        }
    }
    let (mut lo, mut hi) = (0.0, max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
