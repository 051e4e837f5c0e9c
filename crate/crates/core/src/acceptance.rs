//! Release acceptance checks, shared by the test suite and `ucong check`.
//!
//! Every check is deterministic: random instances come from fixed seeds.

use std::cell::Cell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytics::{
    c_poa, diverse_bound, diverse_small_bound, maximize_log, pigou_wcr_equilibrium, potential_gap_coefficients,
    r_poa, wcc_pigou, wcc_upper, wcr_pigou, PigouInstance, WCR_THRESHOLD,
};
use crate::cost::CostFunction;
use crate::equilibrium::{
    default_grid, is_r_convex, is_r_convex_by, solve_rsg_wcc_active_set, solve_wcc_homogeneous, solve_wcr_rsg,
    FwOptions, StartRule, WcrOptions,
};
use crate::error::{Error, Result};
use crate::game::instances::pigou;
use crate::game::GameSpec;
use crate::sampling::{random_affine_network, random_affine_rsg, random_load, random_two_type_rsg};
use crate::uncertainty::UncertaintyVector;
use crate::validation::{poisson_table, run_cycle_demo, CYCLE_STATES, DEFAULT_Z, REFERENCE_R};

#[derive(Debug, Clone)]
pub struct Options {
    /// Expected `r` column of the Poisson table for `t = 1, 2, ...`.
    pub poisson_reference: Vec<f64>,
}

impl Default for Options {
    fn default() -> Self {
        Options { poisson_reference: REFERENCE_R.to_vec() }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!("{} {:>2} {:<17} {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

type Runner = fn(&Options) -> Result<(bool, String)>;

#[derive(Clone, Copy)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    run: Runner,
}

impl Criterion {
    /// Runs the check; an error counts as a failure.
    pub fn run(&self, opts: &Options) -> Outcome {
        let (passed, detail) = match (self.run)(opts) {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        Outcome { id: self.id, name: self.name, passed, detail }
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "pigou_poa", run: pigou_poa },
        Criterion { id: 2, name: "taxation", run: taxation },
        Criterion { id: 3, name: "wcc_curves", run: wcc_curves },
        Criterion { id: 4, name: "sandwich", run: sandwich },
        Criterion { id: 5, name: "wcr_closed_forms", run: wcr_closed_forms },
        Criterion { id: 6, name: "weak_potential", run: weak_potential },
        Criterion { id: 7, name: "cycle", run: cycle },
        Criterion { id: 8, name: "ordered_r", run: ordered_r },
        Criterion { id: 9, name: "diverse", run: diverse },
        Criterion { id: 10, name: "r_convexity", run: r_convexity },
        Criterion { id: 11, name: "poisson", run: poisson },
        Criterion { id: 12, name: "cross_validation", run: cross_validation },
    ]
}

pub fn find(name: &str) -> Option<Criterion> {
    criteria().into_iter().find(|c| c.name == name || c.id.to_string() == name)
}

const TIGHT: f64 = 1e-12;

fn hom(r: f64) -> UncertaintyVector {
    UncertaintyVector::homogeneous(r, 1).expect("r >= 1")
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pigou_poa(_: &Options) -> Result<(bool, String)> {
    let v = c_poa(&pigou(1.0, 1.0)?, &hom(1.0), TIGHT)?.ratio;
    Ok(((v - 4.0 / 3.0).abs() <= 1e-6, format!("ratio {v}")))
}

fn taxation(_: &Options) -> Result<(bool, String)> {
    let mut rng = rng(0x7a);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..100 {
        let g = if k % 2 == 0 { random_affine_rsg(&mut rng) } else { random_affine_network(&mut rng) };
        let v = c_poa(&g, &hom(2.0), TIGHT)?.ratio;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo >= 1.0 && hi <= 1.0 + 1e-5, format!("100 games, ratio in [{lo}, {hi}]")))
}

const FAMILY: (f64, f64, usize) = (1e-3, 1e3, 400);

fn wcc_curves(_: &Options) -> Result<(bool, String)> {
    let mut ok = true;
    let mut worst_rel: f64 = 0.0;
    let mut worst_excess = f64::NEG_INFINITY;
    for r in [1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 6.0, 8.0] {
        let upper = wcc_upper(r)?;
        let excess = Cell::new(f64::NEG_INFINITY);
        let f = |a: f64| -> Result<f64> {
            let v = c_poa(&pigou(a, 1.0)?, &hom(r), TIGHT)?.ratio;
            excess.set(excess.get().max(v - upper));
            Ok(v)
        };
        let (_, max) = maximize_log(f, FAMILY.0, FAMILY.1, FAMILY.2)?;
        let rel = (max - wcc_pigou(r)?).abs() / wcc_pigou(r)?;
        worst_rel = worst_rel.max(rel);
        worst_excess = worst_excess.max(excess.get());
        ok &= rel <= 1e-4 && excess.get() <= 1e-6;
    }
    Ok((ok, format!("max rel. error vs Pigou curve {worst_rel:.2e}, max excess over upper bound {worst_excess:.2e}")))
}

fn sandwich(_: &Options) -> Result<(bool, String)> {
    let mut rng = rng(0x5a);
    let mut violations = 0;
    let mut samples = 0;
    for r in [2.0, 3.0, 5.0] {
        for k in 0..1000 {
            let g = if k % 2 == 0 { random_affine_rsg(&mut rng) } else { random_affine_network(&mut rng) };
            let load = random_load(&mut rng, g.edge_count());
            let sc = g.social_cost(&load)?;
            let phi = g.potential_r(&load, r)?;
            // Rounding slack only: both sides are sums of the same terms.
            let slack = 1e-12 * sc.max(1.0);
            if !(sc <= phi + slack && phi <= r / 2.0 * sc + slack) {
                violations += 1;
            }
            samples += 1;
        }
    }
    Ok((violations == 0, format!("{violations} violations in {samples} load states")))
}

fn pigou_instances(seed: u64, count: usize) -> Vec<PigouInstance> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let a = 10f64.powf(rng.gen_range(-1.0..=1.0));
            let n = rng.gen_range(0.2..5.0);
            PigouInstance::new(a, n).expect("positive")
        })
        .collect()
}

const WCR_RS: [f64; 4] = [1.5, 2.0, WCR_THRESHOLD, 5.0];
const WCR_TOL: f64 = 1e-11;

fn wcr_closed_forms(_: &Options) -> Result<(bool, String)> {
    let mut worst_load: f64 = 0.0;
    let mut worst_unit: f64 = 0.0;
    for p in pigou_instances(0xc5, 50) {
        for r in WCR_RS {
            let res = solve_wcr_rsg(&p.spec(), r, WcrOptions { tol: WCR_TOL, ..WcrOptions::default() })?;
            let (expected, _) = pigou_wcr_equilibrium(p, r)?;
            for e in 0..2 {
                worst_load = worst_load.max((res.load.get(e) - expected.get(e)).abs() / p.n);
            }
        }
        let v = r_poa(&p.spec(), WCR_THRESHOLD, TIGHT)?.ratio;
        worst_unit = worst_unit.max((v - 1.0).abs());
    }
    let mut worst_rel: f64 = 0.0;
    for r in WCR_RS {
        let f = |a: f64| Ok(r_poa(&pigou(a, 1.0)?, r, TIGHT)?.ratio);
        let (_, max) = maximize_log(f, FAMILY.0, FAMILY.1, FAMILY.2)?;
        worst_rel = worst_rel.max((max - wcr_pigou(r)?).abs() / wcr_pigou(r)?);
    }
    let ok = worst_load <= 1e-6 && worst_unit <= 1e-6 && worst_rel <= 1e-4;
    Ok((
        ok,
        format!(
            "load error/n {worst_load:.2e}, |ratio-1| at threshold {worst_unit:.2e}, family max rel. error {worst_rel:.2e}"
        ),
    ))
}

fn weak_potential(_: &Options) -> Result<(bool, String)> {
    let mut games: Vec<GameSpec> = pigou_instances(0xc5, 50).iter().map(|p| p.spec()).collect();
    let mut rng = rng(0x3e);
    games.extend((0..50).map(|_| random_affine_rsg(&mut rng)));
    let mut runs = 0;
    let mut moves = 0;
    let mut bad = 0;
    for g in &games {
        for r in WCR_RS {
            let res = solve_wcr_rsg(g, r, WcrOptions { tol: WCR_TOL, ..WcrOptions::default() })?;
            runs += 1;
            moves += res.history.len().saturating_sub(1);
            if res.history.windows(2).any(|w| !(w[1] < w[0])) {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("{runs} runs, {moves} moves, {bad} runs with a non-decreasing step")))
}

fn cycle(_: &Options) -> Result<(bool, String)> {
    let trace = run_cycle_demo()?;
    let ok = trace.steps.len() <= CYCLE_STATES.len();
    Ok((ok, format!("{} -> back to start after {} moves", CYCLE_STATES.join(" -> "), trace.steps.len())))
}

fn ordered_r(_: &Options) -> Result<(bool, String)> {
    let mut rng = rng(0x0d);
    let mut worst: f64 = 0.0;
    let mut premises = 0;
    let mut broken = 0;
    for k in 0..1000 {
        let g = if k % 2 == 0 { random_affine_rsg(&mut rng) } else { random_affine_network(&mut rng) };
        let s = random_load(&mut rng, g.edge_count());
        let t = random_load(&mut rng, g.edge_count());
        let (z1, z2) = potential_gap_coefficients(&g, &s, &t)?;
        let z = |r: f64| -> Result<f64> { Ok(g.potential_r(&s, r)? - g.potential_r(&t, r)?) };
        let r = rng.gen_range(1.0..5.0);
        worst = worst.max((z(r)? - (r * z1 + z2)).abs());
        let mut rs = [rng.gen_range(1.0..5.0), rng.gen_range(1.0..5.0), rng.gen_range(1.0..5.0)];
        rs.sort_by(f64::total_cmp);
        if z(rs[2])? > 0.0 && z(rs[1])? <= 0.0 {
            premises += 1;
            if z(rs[0])? > 0.0 {
                broken += 1;
            }
        }
    }
    Ok((
        worst < 1e-9 && broken == 0,
        format!("max linearity residual {worst:.2e}; sign rule held on {premises} premises, broken {broken}"),
    ))
}

fn diverse(_: &Options) -> Result<(bool, String)> {
    let mut rng = rng(0xd1);
    let mut converged = 0;
    let mut small_family = 0;
    let mut bad = 0;
    for k in 0..200 {
        let (r_j, r_k) = if k % 2 == 0 {
            (rng.gen_range(1.0..2.0), rng.gen_range(2.0..8.0))
        } else {
            let r_j = rng.gen_range(2.0..4.0);
            (r_j, rng.gen_range(r_j + 0.1..10.0))
        };
        let n_k = rng.gen_range(0.05..0.95);
        let g = random_two_type_rsg(&mut rng, r_j, r_k, n_k);
        let rvec = UncertaintyVector::new(vec![r_j, r_k])?;
        let ratio = match c_poa(&g, &rvec, 1e-10) {
            Ok(rep) => rep.ratio,
            Err(Error::NonConvergence { .. }) => continue,
            Err(e) => return Err(e),
        };
        converged += 1;
        if ratio > diverse_bound(&rvec)? + 1e-6 {
            bad += 1;
        }
        if r_j >= 2.0 {
            small_family += 1;
            if ratio > diverse_small_bound(r_j, r_k, n_k, 1.0)? + 1e-6 {
                bad += 1;
            }
        }
    }
    Ok((
        bad == 0 && converged > 0,
        format!("{converged}/200 converged ({small_family} with r_j >= 2), {bad} bound violations"),
    ))
}

fn r_convexity(_: &Options) -> Result<(bool, String)> {
    let grid = default_grid();
    let costs = [
        ("t^2", CostFunction::polynomial(vec![(1.0, 2.0)])?),
        ("t^3+2t", CostFunction::polynomial(vec![(1.0, 3.0), (2.0, 1.0)])?),
        ("sqrt t", CostFunction::polynomial(vec![(1.0, 0.5)])?),
        ("t+1", CostFunction::affine(1.0, 1.0)?),
    ];
    let mut failures = Vec::new();
    for (name, c) in &costs {
        for r in [1.5, 2.0, 10.0] {
            if !is_r_convex(c, r, &grid)? {
                failures.push(format!("{name} at r={r}"));
            }
        }
    }
    let saturating = is_r_convex_by(|t| (-t).exp(), 2.0, &grid);
    if saturating {
        failures.push("1-e^-t accepted at r=2".into());
    }
    let detail = if failures.is_empty() {
        "convex and power costs pass, 1-e^-t rejected at r=2".to_string()
    } else {
        failures.join("; ")
    };
    Ok((failures.is_empty(), detail))
}

fn poisson(opts: &Options) -> Result<(bool, String)> {
    let rows = poisson_table(opts.poisson_reference.len() as u32, DEFAULT_Z)?;
    let mut worst_r: f64 = 0.0;
    let mut worst_t = 0.0;
    let mut worst_identity: f64 = 0.0;
    for (row, &expected) in rows.iter().zip(&opts.poisson_reference) {
        let d = (row.r - expected).abs();
        if d > worst_r {
            worst_r = d;
            worst_t = row.t;
        }
        let target = row.t * row.t - DEFAULT_Z * DEFAULT_Z / 4.0;
        worst_identity = worst_identity.max((row.x1 * row.x2 - target).abs() / target.abs());
    }
    Ok((
        worst_r <= 1e-4 && worst_identity <= 1e-9,
        format!(
            "max |r - reference| {worst_r:.2e} (t = {worst_t}); x1*x2 vs t^2 - z^2/4 max rel. error {worst_identity:.2e}"
        ),
    ))
}

fn cross_validation(_: &Options) -> Result<(bool, String)> {
    let mut rng = rng(0xcc);
    let tight = FwOptions { tol: TIGHT, ..FwOptions::default() };
    let mut worst_load: f64 = 0.0;
    let mut worst_sc: f64 = 0.0;
    for k in 0..150 {
        let r = rng.gen_range(1.0..5.0);
        if k < 100 {
            let g = random_affine_rsg(&mut rng);
            let fw = solve_wcc_homogeneous(&g, r, tight)?;
            let ws = solve_rsg_wcc_active_set(&g, r)?;
            for e in 0..g.edge_count() {
                worst_load = worst_load.max((fw.load.get(e) - ws.load.get(e)).abs() / g.total_mass());
            }
        }
        let g = if k < 100 { random_affine_rsg(&mut rng) } else { random_affine_network(&mut rng) };
        let a = solve_wcc_homogeneous(&g, r, tight)?;
        let b = solve_wcc_homogeneous(&g, r, FwOptions { start: StartRule::Uniform, ..tight })?;
        let (sa, sb) = (g.social_cost(&a.load)?, g.social_cost(&b.load)?);
        worst_sc = worst_sc.max((sa - sb).abs() / sa);
    }
    Ok((
        worst_load <= 1e-6 && worst_sc <= 1e-6,
        format!("solver load disagreement/n {worst_load:.2e}; start dependence of SC {worst_sc:.2e}"),
    ))
}
