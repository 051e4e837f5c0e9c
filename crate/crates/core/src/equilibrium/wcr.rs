//! Max-regret descent for worst-case-regret players on parallel links.
//!
//! With `y` the resource of least regret, `X` the occupied resources of
//! maximum regret, and `w`, `w'` the resources with the lowest and
//! second-lowest optimistic cost `c_e(s_e / r)`:
//!
//! * (a) `w` not in `X`: move mass from every resource of `X` to `y`;
//! * (b) `w` in `X`, `w'` not: move mass from `X \ {w}` to `w'`;
//! * (c.1) `w, w'` in `X` and the derivative conditions hold: as in (a);
//! * (c.2) otherwise move `eps` from `w` and `delta_e * eps` from each
//!   other `e` in `X` to `y`.
//!
//! The proportions come from a first-order argument; the step is then
//! halved until the maximum regret strictly drops.

use super::rconvex::{default_grid, is_r_convex};
use super::{rsg_flow, EquilibriumResult, Verification};
use crate::error::{Error, Result};
use crate::game::{GameSpec, LoadState};
use crate::uncertainty::{occupied, wcr_all};

const MAX_HALVINGS: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WcrCase {
    A,
    B,
    C1,
    C2,
}

/// Mass taken from each source resource and sent to `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveProposal {
    pub sources: Vec<(usize, f64)>,
    pub target: usize,
    pub case: WcrCase,
    /// Max regret before and after the move.
    pub mr_before: f64,
    pub mr_after: f64,
}

impl MoveProposal {
    pub fn total_mass(&self) -> f64 {
        self.sources.iter().map(|&(_, m)| m).sum()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct WcrOptions {
    /// Stop once `MR - min_e WCR(e)` is at most this.
    pub tol: f64,
    pub max_steps: usize,
    /// Initial move size before halving; `None` means `n / 1000`.
    pub eps_mass: Option<f64>,
}

impl Default for WcrOptions {
    fn default() -> Self {
        WcrOptions { tol: 1e-10, max_steps: 100_000, eps_mass: None }
    }
}

fn check_inputs(spec: &GameSpec, r: f64) -> Result<()> {
    if !spec.is_rsg() {
        return Err(Error::NotAnRsg);
    }
    if spec.edge_count() < 2 {
        return Err(Error::FewerThanTwoEdges);
    }
    if !(r >= 1.0) {
        return Err(Error::OutOfRange { what: "r", value: r });
    }
    let grid = default_grid();
    for (k, e) in spec.edges().iter().enumerate() {
        let ok = is_r_convex(&e.cost, r, &grid).map_err(|_| Error::NonDifferentiableCost { edge: k })?;
        if !ok {
            return Err(Error::NotRConvex { edge: k, r });
        }
    }
    Ok(())
}

pub fn apply_move(load: &LoadState, mv: &MoveProposal) -> LoadState {
    let mut out = load.clone();
    for &(e, m) in &mv.sources {
        out.add(e, -m);
    }
    out.add(mv.target, mv.sources.iter().map(|&(_, m)| m).sum());
    out
}

/// The regret-reducing move at `load`, or `None` at a WCR equilibrium.
pub fn wcr_descent_move(spec: &GameSpec, r: f64, load: &LoadState, eps_mass: f64) -> Result<Option<MoveProposal>> {
    check_inputs(spec, r)?;
    if !(eps_mass > 0.0) {
        return Err(Error::NonPositiveInput("eps_mass"));
    }
    descent_move(spec, r, load, eps_mass)
}

/// Regret gap `MR - min_e WCR(e)`, zero exactly at equilibrium.
fn regret_gap(spec: &GameSpec, wcr: &[f64], load: &LoadState) -> Result<(f64, f64)> {
    let mr = max_occupied(spec, wcr, load).ok_or(Error::EmptyState)?;
    let min = wcr.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((mr, (mr - min).max(0.0)))
}

fn max_occupied(spec: &GameSpec, wcr: &[f64], load: &LoadState) -> Option<f64> {
    wcr.iter()
        .enumerate()
        .filter(|&(e, _)| occupied(spec, load, e))
        .map(|(_, &v)| v)
        .reduce(f64::max)
}

fn ratio(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        if x == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        x / y
    }
}

/// A point strictly inside `(lo, hi)`.
fn interior(lo: f64, hi: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => 2.0 * lo.max(0.5),
        _ => 2.0,
    }
}

fn descent_move(spec: &GameSpec, r: f64, load: &LoadState, eps_mass: f64) -> Result<Option<MoveProposal>> {
    let edges = spec.edges();
    let m = edges.len();
    let wcr = wcr_all(spec, r, load)?;
    let mr = max_occupied(spec, &wcr, load).ok_or(Error::EmptyState)?;
    let tie = 1e-13 * mr.abs().max(1.0);

    let x: Vec<usize> = (0..m).filter(|&e| occupied(spec, load, e) && wcr[e] >= mr - tie).collect();
    let y = (0..m).min_by(|&a, &b| wcr[a].total_cmp(&wcr[b])).expect("at least two edges");
    if wcr[y] >= mr - tie {
        return Ok(None);
    }

    let low: Vec<f64> = (0..m).map(|e| edges[e].cost.eval(load.get(e) / r)).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| low[a].total_cmp(&low[b]).then(a.cmp(&b)));
    let (w, w2) = (order[0], order[1]);
    let in_x = |e: usize| x.contains(&e);

    // Derivatives of c_e(r s) and c_e(s / r) with respect to s.
    let deriv = |e: usize, t: f64| edges[e].cost.derivative(t).unwrap_or(0.0);
    let up = |e: usize| r * deriv(e, r * load.get(e));
    let down = |e: usize| deriv(e, load.get(e) / r) / r;

    let (case, weights, target): (WcrCase, Vec<(usize, f64)>, usize) = if !in_x(w) {
        (WcrCase::A, x.iter().map(|&e| (e, 1.0)).collect(), y)
    } else if !in_x(w2) {
        let rest: Vec<(usize, f64)> = x.iter().filter(|&&e| e != w).map(|&e| (e, 1.0)).collect();
        if rest.is_empty() {
            (WcrCase::B, vec![(w, 1.0)], y)
        } else {
            (WcrCase::B, rest, w2)
        }
    } else {
        let c1 = down(w2) < up(w) && x.iter().filter(|&&e| e != w).all(|&e| down(w) < up(e));
        if c1 {
            (WcrCase::C1, x.iter().map(|&e| (e, 1.0)).collect(), y)
        } else {
            let mut ws = vec![(w, 1.0)];
            for &e in x.iter().filter(|&&e| e != w) {
                let delta = if down(w) >= up(e) {
                    interior(ratio(down(w), up(e)), ratio(up(w), down(e)))
                } else {
                    1.0
                };
                ws.push((e, delta));
            }
            (WcrCase::C2, ws, y)
        }
    };

    // Scale so that no source is overdrawn.
    let mut scale = eps_mass;
    for &(e, wt) in &weights {
        scale = scale.min(load.get(e) / wt);
    }
    for _ in 0..=MAX_HALVINGS {
        let sources: Vec<(usize, f64)> = weights.iter().map(|&(e, wt)| (e, (wt * scale).min(load.get(e)))).collect();
        let mut mv = MoveProposal { sources, target, case, mr_before: mr, mr_after: f64::NAN };
        let next = apply_move(load, &mv);
        let next_wcr = wcr_all(spec, r, &next)?;
        if let Some(after) = max_occupied(spec, &next_wcr, &next) {
            if after < mr {
                mv.mr_after = after;
                return Ok(Some(mv));
            }
        }
        scale *= 0.5;
    }
    Err(Error::DescentStalled { halvings: MAX_HALVINGS })
}

/// Worst-case-regret equilibrium of a resource selection game by repeated
/// descent moves from the uniform split. `history` holds the max regret
/// before every move, which strictly decreases.
pub fn solve_wcr_rsg(spec: &GameSpec, r: f64, opts: WcrOptions) -> Result<EquilibriumResult> {
    check_inputs(spec, r)?;
    let n = spec.total_mass();
    let m = spec.edge_count();
    let eps_mass = opts.eps_mass.unwrap_or(n / 1000.0);
    if !(eps_mass > 0.0) {
        return Err(Error::NonPositiveInput("eps_mass"));
    }
    let mut load = LoadState::new(vec![n / m as f64; m])?;
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let wcr = wcr_all(spec, r, &load)?;
        let (mr, gap) = regret_gap(spec, &wcr, &load)?;
        history.push(mr);
        let done = |load: LoadState, gap, converged, history| {
            let flow = rsg_flow(spec, &load);
            Ok(EquilibriumResult { flow, load, gap, iterations, converged, history })
        };
        if gap <= opts.tol {
            return done(load, gap, true, history);
        }
        if iterations >= opts.max_steps {
            return done(load, gap, false, history);
        }
        match descent_move(spec, r, &load, eps_mass) {
            Ok(Some(mv)) => load = apply_move(&load, &mv),
            Ok(None) => return done(load, gap, true, history),
            // Floating point can leave no representable improving step
            // just above the tolerance; report the iterate as it stands.
            Err(Error::DescentStalled { .. }) => return done(load, gap, false, history),
            Err(e) => return Err(e),
        }
        iterations += 1;
    }
}

/// Occupied resources must have equal regret (within `eps`) and no
/// resource may have lower regret than that common value minus `eps`.
pub fn verify_wcr_equilibrium(spec: &GameSpec, r: f64, load: &LoadState, eps: f64) -> Result<Verification> {
    let wcr = wcr_all(spec, r, load)?;
    let occ: Vec<f64> = (0..wcr.len()).filter(|&e| occupied(spec, load, e)).map(|e| wcr[e]).collect();
    if occ.is_empty() {
        return Err(Error::EmptyState);
    }
    let hi = occ.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo_occ = occ.iter().copied().fold(f64::INFINITY, f64::min);
    let lo_all = wcr.iter().copied().fold(f64::INFINITY, f64::min);
    let worst = (hi - lo_occ).max(hi - lo_all).max(0.0);
    Ok(Verification { ok: worst <= eps, worst_violation: worst })
}
