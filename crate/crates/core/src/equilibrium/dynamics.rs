use std::collections::HashMap;

use super::frank_wolfe::line_search;
use super::{DynamicsTrace, TraceStep, Verification};
use crate::error::{Error, Result};
use crate::game::{FlowState, GameSpec, LoadState, Path};
use crate::uncertainty::{UncertaintyVector, OCCUPANCY};

/// How much of a block moves and when a move counts as improving.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveRule {
    /// A path is improving when it is cheaper than the current one by more
    /// than `eps` at the current state. The moved mass is capped where the
    /// two costs meet, so movers never end worse off.
    NoRegret,
    /// The block moves as one: improving when the destination cost after the
    /// move is strictly below the origin cost before it.
    Atomic,
}

#[derive(Debug, Clone, Copy)]
pub struct DynamicsConfig {
    pub block_mass: f64,
    pub max_steps: usize,
    /// Improvement threshold of [`MoveRule::NoRegret`].
    pub eps: f64,
    pub rule: MoveRule,
}

impl DynamicsConfig {
    pub fn new(block_mass: f64, max_steps: usize) -> Self {
        DynamicsConfig { block_mass, max_steps, eps: 1e-9, rule: MoveRule::NoRegret }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// No commodity has an improving move.
    Equilibrium,
    MaxSteps,
    /// The state after step `at` equals the state after step `first_seen`
    /// (0 = the start state). Only checked under [`MoveRule::Atomic`]; capped
    /// moves shrink toward zero and would alias under quantization.
    Revisit { first_seen: usize, at: usize },
}

/// Runs block best-response dynamics from the state where every commodity
/// sits on its lexicographically first path.
pub fn best_response_dynamics(
    spec: &GameSpec,
    rvec: &UncertaintyVector,
    cfg: DynamicsConfig,
) -> Result<DynamicsTrace> {
    let paths = spec.all_paths()?;
    let start = FlowState::new(
        paths
            .iter()
            .zip(spec.commodities())
            .map(|(ps, c)| [(ps[0].clone(), c.mass)].into_iter().collect())
            .collect(),
    );
    best_response_dynamics_from(spec, rvec, start, cfg)
}

/// Commodities are scanned round-robin starting after the last mover; within
/// a commodity, used paths and then destinations are scanned in
/// lexicographic order and the first improving pair moves.
///
/// Each step records the potential of the modified game when `rvec` is
/// homogeneous and the base-game potential otherwise.
pub fn best_response_dynamics_from(
    spec: &GameSpec,
    rvec: &UncertaintyVector,
    start: FlowState,
    cfg: DynamicsConfig,
) -> Result<DynamicsTrace> {
    if !(cfg.block_mass > 0.0) {
        return Err(Error::NonPositiveInput("block_mass"));
    }
    if rvec.len() != spec.commodities().len() {
        return Err(Error::InvalidSpec("uncertainty vector length differs from commodity count".into()));
    }
    spec.check_flow(&start)?;
    let paths = spec.all_paths()?;
    let r = rvec.as_slice();
    let metric_r = rvec.common().unwrap_or(1.0);
    let n = spec.total_mass();
    let quantum = OCCUPANCY * n;
    let m = paths.len();

    let mut flow = start.clone();
    let mut load = spec.aggregate(&flow);
    let mut seen = HashMap::from([(state_key(&flow, quantum), 0usize)]);
    let mut steps = Vec::new();
    let mut next = 0;

    let termination = loop {
        if steps.len() >= cfg.max_steps {
            break Termination::MaxSteps;
        }
        let Some((i, from, to, mass)) = find_move(spec, r, &paths, &flow, &load, next, cfg, quantum)
        else {
            break Termination::Equilibrium;
        };
        flow.shift(i, &from, &to, mass);
        for &e in from.edges().iter().filter(|e| !to.contains(**e)) {
            load.add(e, -mass);
        }
        for &e in to.edges().iter().filter(|e| !from.contains(**e)) {
            load.add(e, mass);
        }
        let metric = spec.potential_r(&load, metric_r)?;
        steps.push(TraceStep { commodity: i, from, to, mass, load: load.clone(), metric });
        next = (i + 1) % m;
        let at = steps.len();
        if cfg.rule != MoveRule::Atomic {
            continue;
        }
        if let Some(&first_seen) = seen.get(&state_key(&flow, quantum)) {
            break Termination::Revisit { first_seen, at };
        }
        seen.insert(state_key(&flow, quantum), at);
    };
    Ok(DynamicsTrace { start, steps, final_flow: flow, termination })
}

#[allow(clippy::too_many_arguments)]
fn find_move(
    spec: &GameSpec,
    r: &[f64],
    paths: &[Vec<Path>],
    flow: &FlowState,
    load: &LoadState,
    next: usize,
    cfg: DynamicsConfig,
    quantum: f64,
) -> Option<(usize, Path, Path, f64)> {
    let m = paths.len();
    for k in 0..m {
        let i = (next + k) % m;
        let cost = |p: &Path, l: &LoadState| -> f64 {
            p.edges().iter().map(|&e| spec.edges()[e].cost.eval(r[i] * l.get(e))).sum()
        };
        for (from, &mass) in flow.commodity(i) {
            if mass <= quantum {
                continue;
            }
            let current = cost(from, load);
            let block = cfg.block_mass.min(mass);
            for to in paths[i].iter().filter(|p| *p != from) {
                match cfg.rule {
                    MoveRule::Atomic => {
                        let mut after = load.clone();
                        for &e in from.edges().iter().filter(|e| !to.contains(**e)) {
                            after.add(e, -block);
                        }
                        for &e in to.edges().iter().filter(|e| !from.contains(**e)) {
                            after.add(e, block);
                        }
                        if cost(to, &after) < current {
                            return Some((i, from.clone(), to.clone(), block));
                        }
                    }
                    MoveRule::NoRegret => {
                        if cost(to, load) < current - cfg.eps {
                            let moved = line_search(spec, r[i], load, from, to, block);
                            if moved > 0.0 {
                                return Some((i, from.clone(), to.clone(), moved));
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

fn state_key(flow: &FlowState, quantum: f64) -> Vec<(usize, Path, i64)> {
    let mut key = Vec::new();
    for (i, paths) in flow.commodities().iter().enumerate() {
        for (p, &m) in paths {
            let q = (m / quantum).round() as i64;
            if q != 0 {
                key.push((i, p.clone(), q));
            }
        }
    }
    key
}

/// Checks that no used path of any commodity is worse than its best
/// alternative under the commodity's worst-case costs by more than `eps`.
pub fn verify_wcc_equilibrium(
    spec: &GameSpec,
    rvec: &UncertaintyVector,
    flow: &FlowState,
    eps: f64,
) -> Result<Verification> {
    if rvec.len() != spec.commodities().len() {
        return Err(Error::InvalidSpec("uncertainty vector length differs from commodity count".into()));
    }
    let load = spec.load_from_flow(flow)?;
    let quantum = OCCUPANCY * spec.total_mass();
    let mut worst: f64 = 0.0;
    for (i, &r) in rvec.as_slice().iter().enumerate() {
        let paths = spec.enumerate_paths(i)?;
        let costs = super::path_costs(spec, r, &paths, &load);
        let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
        for (p, c) in paths.iter().zip(&costs) {
            if flow.mass_on(i, p) > quantum {
                worst = worst.max(c - best);
            }
        }
    }
    Ok(Verification { ok: worst <= eps, worst_violation: worst })
}
