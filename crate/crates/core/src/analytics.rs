//! Price-of-anarchy ratios, closed-form bound curves and the Pigou family.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::equilibrium::{
    best_response_dynamics, solve_optimum, solve_wcc_homogeneous, solve_wcr_rsg, verify_wcc_equilibrium,
    DynamicsConfig, FwOptions, Termination, WcrOptions,
};
use crate::error::{Error, Result};
use crate::game::{instances, GameSpec, LoadState};
use crate::sampling::random_affine_rsg;
use crate::uncertainty::UncertaintyVector;

/// `2 + sqrt(3)`, where the two WCR Pigou regimes meet.
pub const WCR_THRESHOLD: f64 = 3.732_050_807_568_877;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Base,
    Wcc,
    Wcr,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Base => "base",
            Model::Wcc => "wcc",
            Model::Wcr => "wcr",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PoaReport {
    pub equilibrium_sc: f64,
    pub optimal_sc: f64,
    pub ratio: f64,
    pub model: Model,
    /// Uncertainty per commodity used for the equilibrium.
    pub r: Vec<f64>,
    #[serde(skip)]
    pub equilibrium: LoadState,
}

fn fw(tol: f64) -> FwOptions {
    FwOptions { tol, ..FwOptions::default() }
}

fn report(spec: &GameSpec, eq: LoadState, model: Model, r: Vec<f64>, tol: f64) -> Result<PoaReport> {
    let opt = solve_optimum(spec, fw(tol))?;
    if !opt.converged {
        return Err(Error::NotConverged { iterations: opt.iterations, gap: opt.gap });
    }
    let optimal_sc = spec.social_cost(&opt.load)?;
    if !(optimal_sc > 0.0) {
        return Err(Error::OutOfRange { what: "optimal social cost", value: optimal_sc });
    }
    let equilibrium_sc = spec.social_cost(&eq)?;
    Ok(PoaReport { equilibrium_sc, optimal_sc, ratio: equilibrium_sc / optimal_sc, model, r, equilibrium: eq })
}

fn wcc_homogeneous(spec: &GameSpec, r: f64, tol: f64) -> Result<LoadState> {
    let eq = solve_wcc_homogeneous(spec, r, fw(tol))?;
    if !eq.converged {
        return Err(Error::NotConverged { iterations: eq.iterations, gap: eq.gap });
    }
    Ok(eq.load)
}

/// Equilibrium social cost over optimal social cost. All equilibria share
/// the same social cost, so any one will do.
pub fn price_of_anarchy(spec: &GameSpec, tol: f64) -> Result<PoaReport> {
    let eq = wcc_homogeneous(spec, 1.0, tol)?;
    report(spec, eq, Model::Base, vec![1.0; spec.commodities().len()], tol)
}

/// Ratio for WCC players: the equilibrium is taken in the game with costs
/// `c_e(r_i t)`, its social cost under the original costs.
///
/// A heterogeneous `rvec` is handled by best-response dynamics with an
/// improvement threshold of `tol`; a run that does not settle returns
/// [`Error::NonConvergence`] with its trace.
pub fn c_poa(spec: &GameSpec, rvec: &UncertaintyVector, tol: f64) -> Result<PoaReport> {
    if rvec.len() != spec.commodities().len() {
        return Err(Error::InvalidSpec("uncertainty vector length differs from commodity count".into()));
    }
    let eq = match rvec.common() {
        Some(r) => wcc_homogeneous(spec, r, tol)?,
        None => {
            let cfg = DynamicsConfig { eps: tol, ..DynamicsConfig::new(spec.total_mass(), 1_000_000) };
            let trace = best_response_dynamics(spec, rvec, cfg)?;
            if trace.termination != Termination::Equilibrium
                || !verify_wcc_equilibrium(spec, rvec, &trace.final_flow, tol)?.ok
            {
                return Err(Error::NonConvergence { trace: Box::new(trace) });
            }
            trace.final_load(spec)
        }
    };
    report(spec, eq, Model::Wcc, rvec.as_slice().to_vec(), tol)
}

/// Ratio for WCR players on a resource selection game with r-convex costs.
/// `tol` bounds the regret spread of the equilibrium and the relative gap
/// of the optimum.
pub fn r_poa(spec: &GameSpec, r: f64, tol: f64) -> Result<PoaReport> {
    let eq = solve_wcr_rsg(spec, r, WcrOptions { tol, ..WcrOptions::default() })?;
    report(spec, eq.load, Model::Wcr, vec![r; spec.commodities().len()], tol)
}

/// Pigou instance: link 1 costs 1, link 2 costs `a t`, mass `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PigouInstance {
    pub a: f64,
    pub n: f64,
}

impl PigouInstance {
    pub fn new(a: f64, n: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::NonPositiveInput("a"));
        }
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NonPositiveInput("n"));
        }
        Ok(PigouInstance { a, n })
    }

    pub fn spec(&self) -> GameSpec {
        instances::pigou(self.a, self.n).expect("validated instance")
    }

    fn split(&self, s2: f64) -> (LoadState, f64) {
        let s2 = s2.min(self.n);
        let s1 = self.n - s2;
        let load = LoadState::new(vec![s1, s2]).expect("nonnegative");
        (load, s1 + self.a * s2 * s2)
    }
}

fn check_r(r: f64) -> Result<()> {
    if r >= 1.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange { what: "r", value: r })
    }
}

/// WCC equilibrium: `s2 = min(n, 1/(a r))`.
pub fn pigou_wcc_equilibrium(p: PigouInstance, r: f64) -> Result<(LoadState, f64)> {
    check_r(r)?;
    Ok(p.split(1.0 / (p.a * r)))
}

/// Optimum: `s2 = min(n, 1/(2a))`.
pub fn pigou_optimum(p: PigouInstance) -> (LoadState, f64) {
    p.split(1.0 / (2.0 * p.a))
}

/// WCR equilibrium: `s2 = min(n, 2/(a (r + 1/r)))`.
pub fn pigou_wcr_equilibrium(p: PigouInstance, r: f64) -> Result<(LoadState, f64)> {
    check_r(r)?;
    Ok(p.split(2.0 / (p.a * (r + 1.0 / r))))
}

/// Closed-form equilibrium-over-optimum ratio on a Pigou instance.
pub fn pigou_ratio(model: Model, p: PigouInstance, r: f64) -> Result<f64> {
    let eq = match model {
        Model::Base => pigou_wcc_equilibrium(p, 1.0)?.1,
        Model::Wcc => pigou_wcc_equilibrium(p, r)?.1,
        Model::Wcr => pigou_wcr_equilibrium(p, r)?.1,
    };
    Ok(eq / pigou_optimum(p).1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `(2 + 2r)/(3r)` on `[1, 2]`.
    WccUpperLo,
    /// `r/2` for `r >= 2`.
    WccUpperHi,
    /// `4/(4r - r^2)` on `[1, 2]`.
    WccPigouLo,
    /// `r^2/(4(r - 1))` for `r >= 2`.
    WccPigouHi,
    /// `16/(8q - q^2)` with `q = r + 1/r`, on `[1, 2 + sqrt 3]`.
    WcrPigouLo,
    /// `q^2/(8q - 16)` for `r >= 2 + sqrt 3`.
    WcrPigouHi,
}

impl BoundKind {
    pub const ALL: [BoundKind; 6] = [
        BoundKind::WccUpperLo,
        BoundKind::WccUpperHi,
        BoundKind::WccPigouLo,
        BoundKind::WccPigouHi,
        BoundKind::WcrPigouLo,
        BoundKind::WcrPigouHi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::WccUpperLo => "wcc_upper_lo",
            BoundKind::WccUpperHi => "wcc_upper_hi",
            BoundKind::WccPigouLo => "wcc_pigou_lo",
            BoundKind::WccPigouHi => "wcc_pigou_hi",
            BoundKind::WcrPigouLo => "wcr_pigou_lo",
            BoundKind::WcrPigouHi => "wcr_pigou_hi",
        }
    }

    /// Closed validity interval of `r`.
    pub fn range(self) -> (f64, f64) {
        match self {
            BoundKind::WccUpperLo | BoundKind::WccPigouLo => (1.0, 2.0),
            BoundKind::WccUpperHi | BoundKind::WccPigouHi => (2.0, f64::INFINITY),
            BoundKind::WcrPigouLo => (1.0, WCR_THRESHOLD),
            BoundKind::WcrPigouHi => (WCR_THRESHOLD, f64::INFINITY),
        }
    }
}

pub fn closed_form_bound(kind: BoundKind, r: f64) -> Result<f64> {
    let (lo, hi) = kind.range();
    // Allow rounding in a caller's grid to land a hair past a finite end.
    let slack = 1e-12 * lo.max(1.0);
    if !(r >= lo - slack && r <= hi + slack) || !r.is_finite() {
        return Err(Error::OutOfRange { what: "r", value: r });
    }
    let q = r + 1.0 / r;
    Ok(match kind {
        BoundKind::WccUpperLo => (2.0 + 2.0 * r) / (3.0 * r),
        BoundKind::WccUpperHi => r / 2.0,
        BoundKind::WccPigouLo => 4.0 / (4.0 * r - r * r),
        BoundKind::WccPigouHi => r * r / (4.0 * (r - 1.0)),
        BoundKind::WcrPigouLo => 16.0 / (8.0 * q - q * q),
        BoundKind::WcrPigouHi => q * q / (8.0 * q - 16.0),
    })
}

/// Upper bound on the WCC ratio of any affine game, picking the applicable
/// regime.
pub fn wcc_upper(r: f64) -> Result<f64> {
    check_r(r)?;
    closed_form_bound(if r <= 2.0 { BoundKind::WccUpperLo } else { BoundKind::WccUpperHi }, r)
}

/// Worst WCC ratio over Pigou instances.
pub fn wcc_pigou(r: f64) -> Result<f64> {
    check_r(r)?;
    closed_form_bound(if r <= 2.0 { BoundKind::WccPigouLo } else { BoundKind::WccPigouHi }, r)
}

/// Worst WCR ratio over Pigou instances.
pub fn wcr_pigou(r: f64) -> Result<f64> {
    check_r(r)?;
    closed_form_bound(if r <= WCR_THRESHOLD { BoundKind::WcrPigouLo } else { BoundKind::WcrPigouHi }, r)
}

/// Maximizes `f` over `[lo, hi]` (both positive): the best of `points`
/// log-spaced samples, refined by golden-section search in log space between
/// its neighbours. Assumes `f` is unimodal on that bracket.
pub fn maximize_log<F>(f: F, lo: f64, hi: f64, points: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(lo > 0.0 && hi > lo && points >= 2) {
        return Err(Error::InvalidSpec("maximize_log needs 0 < lo < hi and at least two points".into()));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let grid: Vec<f64> = (0..points).map(|k| llo + (lhi - llo) * k as f64 / (points - 1) as f64).collect();
    let mut best = (0, f64::NEG_INFINITY);
    for (k, &u) in grid.iter().enumerate() {
        let v = f(u.exp())?;
        if v > best.1 {
            best = (k, v);
        }
    }
    let (mut a, mut b) = (grid[best.0.saturating_sub(1)], grid[(best.0 + 1).min(points - 1)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c.exp())?, f(d.exp())?);
    for _ in 0..100 {
        if b - a < 1e-13 {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d.exp())?;
        }
    }
    let candidates = [(grid[best.0], best.1), (c, fc), (d, fd)];
    let (u, v) = candidates.into_iter().fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    Ok((u.exp(), v))
}

/// A Pigou instance with `n = 1` attaining the worst ratio for `model` at `r`.
pub fn worst_pigou_instance(model: Model, r: f64) -> Result<PigouInstance> {
    check_r(r)?;
    let a = match model {
        Model::Base => 1.0,
        Model::Wcc if r <= 2.0 => 1.0 / r,
        Model::Wcc => 2.0 * (r - 1.0) / (r * r),
        Model::Wcr if r <= WCR_THRESHOLD => 2.0 / (r + 1.0 / r),
        Model::Wcr => {
            let ratio = |a: f64| pigou_ratio(Model::Wcr, PigouInstance::new(a, 1.0)?, r);
            maximize_log(ratio, 1e-3, 1e3, 400)?.0
        }
    };
    PigouInstance::new(a, 1.0)
}

/// `(Z1, Z2)` with `phi^r(load1) - phi^r(load2) = r Z1 + Z2` for every `r`:
/// `Z1 = 1/2 sum a_e (s_e^2 - s'_e^2)`, `Z2 = sum b_e (s_e - s'_e)`.
pub fn potential_gap_coefficients(spec: &GameSpec, load1: &LoadState, load2: &LoadState) -> Result<(f64, f64)> {
    let m = spec.edge_count();
    for l in [load1, load2] {
        if l.len() != m {
            return Err(Error::EdgeSetMismatch { left: m, right: l.len() });
        }
    }
    let coef = spec.require_affine()?;
    let mut z1 = 0.0;
    let mut z2 = 0.0;
    for (e, &(a, b)) in coef.iter().enumerate() {
        let (s, t) = (load1.get(e), load2.get(e));
        z1 += 0.5 * a * (s * s - t * t);
        z2 += b * (s - t);
    }
    Ok((z1, z2))
}

/// `alpha_j * alpha_k` from the smallest and largest uncertainty: `alpha_j`
/// is the `[1, 2]` upper bound at `r_min` when `r_min < 2` and 1 otherwise,
/// `alpha_k = max(1, r_max / 2)`.
pub fn diverse_bound(rvec: &UncertaintyVector) -> Result<f64> {
    if rvec.is_empty() {
        return Err(Error::InvalidSpec("empty uncertainty vector".into()));
    }
    let (lo, hi) = (rvec.min(), rvec.max());
    let alpha_j = if lo < 2.0 { closed_form_bound(BoundKind::WccUpperLo, lo)? } else { 1.0 };
    Ok(alpha_j * (hi / 2.0).max(1.0))
}

/// Two-type bound `r_j/2 + (n_k/n) * 4 r_k / 3`, for `r_k > r_j >= 2`. The
/// `4/3` constant is the one that falls out of the proof of the asymptotic
/// statement.
pub fn diverse_small_bound(r_j: f64, r_k: f64, n_k: f64, n: f64) -> Result<f64> {
    if !(r_j >= 2.0 && r_j.is_finite()) {
        return Err(Error::OutOfRange { what: "r_j", value: r_j });
    }
    if !(r_k > r_j && r_k.is_finite()) {
        return Err(Error::OutOfRange { what: "r_k", value: r_k });
    }
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::NonPositiveInput("n"));
    }
    if !(0.0..=n).contains(&n_k) {
        return Err(Error::OutOfRange { what: "n_k", value: n_k });
    }
    Ok(r_j / 2.0 + n_k / n * 4.0 * r_k / 3.0)
}

/// Random games whose worst measured ratio is added to every sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub games: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub r: f64,
    pub wcc_upper: f64,
    pub wcc_pigou: f64,
    pub wcr_pigou: f64,
    pub empirical_cpoa: Option<f64>,
}

pub const SWEEP_CSV_HEADER: &str = "r,wcc_upper,wcc_pigou,wcr_pigou,empirical_cpoa";

impl SweepRow {
    /// CSV line with shortest round-trip formatting; an absent sample column
    /// is left empty.
    pub fn csv_line(&self) -> String {
        let emp = self.empirical_cpoa.map(|v| v.to_string()).unwrap_or_default();
        format!("{},{},{},{},{}", self.r, self.wcc_upper, self.wcc_pigou, self.wcr_pigou, emp)
    }
}

const SWEEP_TOL: f64 = 1e-10;

/// Uniform grid of `steps` values on `[r_min, r_max]`, each row carrying all
/// bound curves and, with `sample`, the worst measured WCC ratio over the same
/// seeded random parallel-link games. `jobs > 1` evaluates rows on a thread
/// pool of that size; the output is identical either way.
pub fn sweep(r_min: f64, r_max: f64, steps: usize, sample: Option<SampleConfig>, jobs: usize) -> Result<Vec<SweepRow>> {
    if !(r_min >= 1.0 && r_max > r_min && r_max.is_finite()) {
        return Err(Error::OutOfRange { what: "r_max", value: r_max });
    }
    if steps < 2 {
        return Err(Error::OutOfRange { what: "steps", value: steps as f64 });
    }
    let games: Vec<GameSpec> = match sample {
        Some(cfg) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..cfg.games).map(|_| random_affine_rsg(&mut rng)).collect()
        }
        None => Vec::new(),
    };
    let grid: Vec<f64> = (0..steps)
        .map(|k| if k + 1 == steps { r_max } else { r_min + (r_max - r_min) * k as f64 / (steps - 1) as f64 })
        .collect();
    let row = |&r: &f64| -> Result<SweepRow> {
        let empirical_cpoa = if sample.is_some() {
            let mut worst = f64::NEG_INFINITY;
            for g in &games {
                let rv = UncertaintyVector::homogeneous(r, 1)?;
                worst = worst.max(c_poa(g, &rv, SWEEP_TOL)?.ratio);
            }
            Some(worst)
        } else {
            None
        };
        Ok(SweepRow { r, wcc_upper: wcc_upper(r)?, wcc_pigou: wcc_pigou(r)?, wcr_pigou: wcr_pigou(r)?, empirical_cpoa })
    };
    if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidSpec(format!("thread pool: {e}")))?;
        pool.install(|| grid.par_iter().map(row).collect())
    } else {
        grid.iter().map(row).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostFunction;
    use crate::game::instances::{parallel_links, pigou};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn hom(r: f64) -> UncertaintyVector {
        UncertaintyVector::homogeneous(r, 1).unwrap()
    }

    #[test]
    fn base_poa_examples() {
        let p = price_of_anarchy(&pigou(1.0, 1.0).unwrap(), 1e-12).unwrap();
        assert!(close(p.ratio, 4.0 / 3.0, 1e-6), "{}", p.ratio);
        let constant = parallel_links(
            vec![CostFunction::constant(2.0).unwrap(), CostFunction::constant(3.0).unwrap()],
            1.0,
            1.0,
        )
        .unwrap();
        assert!(close(price_of_anarchy(&constant, 1e-12).unwrap().ratio, 1.0, 1e-12));
        assert!(close(price_of_anarchy(&pigou(1.0, 0.25).unwrap(), 1e-12).unwrap().ratio, 1.0, 1e-9));
    }

    #[test]
    fn c_poa_examples() {
        // a n = 1/(r - 1) leaves the optimum at the corner but the
        // equilibrium interior: (1/4 + 3/16) / (1/3) = 21/16.
        let r = c_poa(&pigou(1.0 / 3.0, 1.0).unwrap(), &hom(4.0), 1e-12).unwrap();
        assert!(close(r.ratio, 21.0 / 16.0, 1e-6), "{}", r.ratio);
        let r = c_poa(&pigou(3.0 / 8.0, 1.0).unwrap(), &hom(4.0), 1e-12).unwrap();
        assert!(close(r.ratio, 4.0 / 3.0, 1e-6), "{}", r.ratio);
        assert_eq!(r.model, Model::Wcc);
        let r = c_poa(&pigou(1.0, 1.0).unwrap(), &hom(1.0), 1e-12).unwrap();
        assert!(close(r.ratio, 4.0 / 3.0, 1e-6));
        let g = parallel_links(
            vec![CostFunction::affine(1.0, 0.2).unwrap(), CostFunction::affine(0.5, 0.7).unwrap()],
            1.0,
            1.0,
        )
        .unwrap();
        let r = c_poa(&g, &hom(2.0), 1e-12).unwrap();
        assert!(r.ratio >= 1.0 - 1e-9 && r.ratio <= 1.0 + 1e-6, "{}", r.ratio);
    }

    #[test]
    fn r_poa_examples() {
        let r = r_poa(&pigou(1.0, 1.0).unwrap(), 2.0, 1e-12).unwrap();
        assert!(close(r.ratio, 0.84 / 0.75, 1e-6), "{}", r.ratio);
        let r = r_poa(&pigou(0.8, 1.0).unwrap(), 2.0, 1e-12).unwrap();
        assert!(close(r.ratio, 0.8 / 0.6875, 1e-6), "{}", r.ratio);
        for a in [0.3, 1.0, 4.0] {
            let r = r_poa(&pigou(a, 1.0).unwrap(), WCR_THRESHOLD, 1e-12).unwrap();
            assert!(close(r.ratio, 1.0, 1e-6), "{a}: {}", r.ratio);
        }
    }

    #[test]
    fn pigou_closed_forms() {
        let p = PigouInstance::new(1.0, 1.0).unwrap();
        let (l, sc) = pigou_wcc_equilibrium(p, 2.0).unwrap();
        assert!(close(l.get(1), 0.5, 1e-15) && close(sc, 0.75, 1e-15));
        let q = PigouInstance::new(1.0, 0.25).unwrap();
        assert!(close(pigou_wcc_equilibrium(q, 2.0).unwrap().1, 0.0625, 1e-15));
        assert!(close(pigou_wcc_equilibrium(p, 1.0).unwrap().0.get(1), 1.0, 1e-15));
        let (l, sc) = pigou_optimum(p);
        assert!(close(l.get(1), 0.5, 1e-15) && close(sc, 0.75, 1e-15));
        assert!(close(pigou_optimum(q).1, 0.0625, 1e-15));
        let (l, sc) = pigou_wcr_equilibrium(p, 2.0).unwrap();
        assert!(close(l.get(1), 0.8, 1e-15) && close(sc, 0.84, 1e-15));
        let c = PigouInstance::new(0.8, 1.0).unwrap();
        assert!(close(pigou_wcr_equilibrium(c, 2.0).unwrap().1, 0.8, 1e-12));
        let (l, _) = pigou_wcr_equilibrium(PigouInstance::new(0.7, 5.0).unwrap(), WCR_THRESHOLD).unwrap();
        assert!(close(l.get(1), 1.0 / 1.4, 1e-12));
        assert!(pigou_wcc_equilibrium(p, 0.5).is_err());
        assert!(PigouInstance::new(0.0, 1.0).is_err());
    }

    #[test]
    fn optimum_closed_form_matches_solver() {
        for (a, n) in [(1.0, 1.0), (0.3, 2.0), (4.0, 0.1), (2.0, 0.2)] {
            let p = PigouInstance::new(a, n).unwrap();
            let opt = solve_optimum(&p.spec(), fw(1e-14)).unwrap();
            let sc = p.spec().social_cost(&opt.load).unwrap();
            assert!(close(sc, pigou_optimum(p).1, 1e-9), "{a} {n}");
        }
    }

    #[test]
    fn bound_examples() {
        use BoundKind::*;
        assert!(close(closed_form_bound(WccPigouLo, 1.0).unwrap(), 4.0 / 3.0, 1e-15));
        assert!(close(closed_form_bound(WccUpperLo, 1.0).unwrap(), 4.0 / 3.0, 1e-15));
        assert!(close(closed_form_bound(WccUpperHi, 4.0).unwrap(), 2.0, 1e-15));
        assert!(close(closed_form_bound(WccPigouHi, 4.0).unwrap(), 4.0 / 3.0, 1e-15));
        assert!(close(closed_form_bound(WcrPigouLo, WCR_THRESHOLD).unwrap(), 1.0, 1e-12));
        assert!(close(closed_form_bound(WcrPigouHi, WCR_THRESHOLD).unwrap(), 1.0, 1e-12));
        assert!(close(closed_form_bound(WcrPigouLo, 1.0).unwrap(), 4.0 / 3.0, 1e-15));
        assert!(closed_form_bound(WccPigouLo, 2.5).is_err());
        assert!(closed_form_bound(WccPigouHi, 1.5).is_err());
        assert!(closed_form_bound(WcrPigouHi, 3.0).is_err());
        assert!(closed_form_bound(WccUpperLo, 0.9).is_err());
        assert!(close(WCR_THRESHOLD, 2.0 + 3f64.sqrt(), 1e-15));
    }

    #[test]
    fn worst_instances_attain_the_curves() {
        let p = worst_pigou_instance(Model::Wcc, 4.0).unwrap();
        assert!(close(p.a * p.n, 3.0 / 8.0, 1e-15));
        assert!(close(pigou_ratio(Model::Wcc, p, 4.0).unwrap(), 4.0 / 3.0, 1e-12));
        let p = worst_pigou_instance(Model::Wcc, 1.5).unwrap();
        assert!(close(p.a * p.n, 2.0 / 3.0, 1e-15));
        assert!(close(pigou_ratio(Model::Wcc, p, 1.5).unwrap(), 16.0 / 15.0, 1e-12));
        let p = worst_pigou_instance(Model::Wcr, 2.0).unwrap();
        assert!(close(p.a * p.n, 0.8, 1e-15));
        assert!(close(pigou_ratio(Model::Wcr, p, 2.0).unwrap(), 0.8 / 0.6875, 1e-12));
        for r in [4.0, 5.0, 8.0] {
            let p = worst_pigou_instance(Model::Wcr, r).unwrap();
            let v = pigou_ratio(Model::Wcr, p, r).unwrap();
            assert!(close(v, wcr_pigou(r).unwrap(), 1e-9), "{r}: {v}");
        }
    }

    #[test]
    fn potential_gap_example() {
        let g = pigou(1.0, 1.0).unwrap();
        let s = LoadState::new(vec![0.0, 1.0]).unwrap();
        let t = LoadState::new(vec![0.5, 0.5]).unwrap();
        let (z1, z2) = potential_gap_coefficients(&g, &s, &t).unwrap();
        assert!(close(z1, 0.375, 1e-15) && close(z2, -0.5, 1e-15));
        let direct = g.potential_r(&s, 2.0).unwrap() - g.potential_r(&t, 2.0).unwrap();
        assert!(close(direct, 0.25, 1e-15) && close(2.0 * z1 + z2, 0.25, 1e-15));
        assert_eq!(potential_gap_coefficients(&g, &s, &s).unwrap(), (0.0, 0.0));
        let quad = parallel_links(vec![CostFunction::polynomial(vec![(1.0, 2.0)]).unwrap()], 1.0, 1.0).unwrap();
        let one = LoadState::new(vec![1.0]).unwrap();
        assert!(matches!(potential_gap_coefficients(&quad, &one, &one), Err(Error::NonAffine { .. })));
    }

    #[test]
    fn diverse_examples() {
        let rv = |v: Vec<f64>| UncertaintyVector::new(v).unwrap();
        assert!(close(diverse_bound(&rv(vec![2.0, 2.0])).unwrap(), 1.0, 1e-15));
        assert!(close(diverse_bound(&rv(vec![1.5, 3.0])).unwrap(), 5.0 / 3.0, 1e-15));
        assert!(close(diverse_bound(&rv(vec![1.0, 1.0])).unwrap(), 4.0 / 3.0, 1e-15));
        assert!(close(diverse_small_bound(3.0, 5.0, 0.0, 1.0).unwrap(), 1.5, 1e-15));
        assert!(close(diverse_small_bound(2.0, 10.0, 0.1, 1.0).unwrap(), 7.0 / 3.0, 1e-15));
        assert!(close(diverse_small_bound(2.0, 4.0, 2.0, 2.0).unwrap(), 1.0 + 16.0 / 3.0, 1e-15));
        assert!(diverse_small_bound(1.5, 4.0, 0.1, 1.0).is_err());
        assert!(diverse_small_bound(3.0, 3.0, 0.1, 1.0).is_err());
        assert!(diverse_small_bound(2.0, 3.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn heterogeneous_c_poa_runs_dynamics() {
        let g = GameSpec::new(
            vec!["s".into(), "t".into()],
            parallel_links(
                vec![CostFunction::affine(1.0, 0.0).unwrap(), CostFunction::affine(0.5, 0.3).unwrap()],
                1.0,
                1.0,
            )
            .unwrap()
            .edges()
            .to_vec(),
            vec![
                crate::Commodity { source: 0, target: 1, mass: 0.5, r: 1.0 },
                crate::Commodity { source: 0, target: 1, mass: 0.5, r: 3.0 },
            ],
        )
        .unwrap();
        let rv = UncertaintyVector::new(vec![1.0, 3.0]).unwrap();
        let rep = c_poa(&g, &rv, 1e-10).unwrap();
        assert!(rep.ratio >= 1.0 - 1e-9);
        assert!(rep.ratio <= diverse_bound(&rv).unwrap() + 1e-6);
    }

    #[test]
    fn sweep_rows() {
        let rows = sweep(1.0, 8.0, 141, None, 1).unwrap();
        assert_eq!(rows.len(), 141);
        assert!(close(rows[0].wcc_pigou, 4.0 / 3.0, 1e-12));
        assert!(close(rows[0].wcc_upper, 4.0 / 3.0, 1e-12));
        assert!(close(rows[0].wcr_pigou, 4.0 / 3.0, 1e-12));
        let two = rows.iter().find(|r| close(r.r, 2.0, 1e-12)).unwrap();
        assert!(close(two.wcc_pigou, 1.0, 1e-12) && close(two.wcc_upper, 1.0, 1e-12));
        for w in rows.windows(2) {
            if w[1].r <= 2.0 {
                assert!(w[1].wcc_pigou < w[0].wcc_pigou);
            } else if w[0].r >= 2.0 {
                assert!(w[1].wcc_pigou > w[0].wcc_pigou);
            }
            assert!(w[0].wcc_pigou <= w[0].wcc_upper + 1e-9);
        }
        assert!(sweep(2.0, 2.0, 10, None, 1).is_err());
        assert!(sweep(1.0, 2.0, 1, None, 1).is_err());
    }

    #[test]
    fn sampled_sweep_is_deterministic_across_job_counts() {
        let cfg = Some(SampleConfig { games: 4, seed: 7 });
        let a = sweep(1.0, 3.0, 5, cfg, 1).unwrap();
        let b = sweep(1.0, 3.0, 5, cfg, 3).unwrap();
        assert_eq!(a, b);
        for row in &a {
            let e = row.empirical_cpoa.unwrap();
            assert!(e >= 1.0 - 1e-9 && e <= row.wcc_upper + 1e-6, "{row:?}");
        }
    }

    #[test]
    fn maximize_log_finds_a_kink() {
        let f = |x: f64| Ok(-(x.ln() - 0.3).abs());
        let (x, v) = maximize_log(f, 1e-3, 1e3, 50).unwrap();
        assert!(close(x.ln(), 0.3, 1e-9) && v > -1e-9);
    }
}
