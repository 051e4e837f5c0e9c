//! Multiplicative-distance uncertainty over load states and the worst-case
//! cost (WCC) and worst-case regret (WCR) evaluations it induces.
//!
//! An agent with uncertainty `r` treats every load state whose per-edge
//! loads lie in `[load_e / r, load_e * r]` as possible. The worst case of a
//! path cost over that box is attained edgewise at the upper corner, and the
//! best case of an alternative at the lower corner.

use crate::cost::CostFunction;
use crate::error::{Error, Result};
use crate::game::{GameSpec, LoadState, Path};

/// Loads at or below `OCCUPANCY * total mass` count as unoccupied.
pub const OCCUPANCY: f64 = 1e-9;

/// Signed regret; negative values are legitimate and never clamped.
pub type RegretValue = f64;

/// Per-commodity uncertainty parameters, each at least 1.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyVector(Vec<f64>);

impl UncertaintyVector {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::InvalidSpec("empty uncertainty vector".into()));
        }
        if let Some(&bad) = r.iter().find(|&&x| !(x.is_finite() && x >= 1.0)) {
            return Err(Error::OutOfRange { what: "r", value: bad });
        }
        Ok(UncertaintyVector(r))
    }

    pub fn homogeneous(r: f64, commodities: usize) -> Result<Self> {
        Self::new(vec![r; commodities])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The common value when all entries agree.
    pub fn common(&self) -> Option<f64> {
        let r = self.0[0];
        self.0.iter().all(|&x| x == r).then_some(r)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn same_edges(a: &LoadState, b: &LoadState) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::EdgeSetMismatch { left: a.len(), right: b.len() });
    }
    Ok(())
}

/// Smallest `x >= 0` with every load within a factor `1 + x` of the other.
/// Returns `f64::INFINITY` when one state has zero load on an edge where the
/// other does not.
pub fn state_distance(l1: &LoadState, l2: &LoadState) -> Result<f64> {
    same_edges(l1, l2)?;
    let mut d: f64 = 0.0;
    for (&x, &y) in l1.as_slice().iter().zip(l2.as_slice()) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        if hi == 0.0 {
            continue;
        }
        if lo == 0.0 {
            return Ok(f64::INFINITY);
        }
        d = d.max(hi / lo - 1.0);
    }
    Ok(d)
}

/// Whether `candidate` lies in the possible-state set of `reference` under
/// uncertainty `r`.
pub fn is_possible(candidate: &LoadState, reference: &LoadState, r: f64) -> Result<bool> {
    if !(r >= 1.0) {
        return Err(Error::OutOfRange { what: "r", value: r });
    }
    Ok(state_distance(reference, candidate)? <= r - 1.0)
}

/// `c_e(r_i * load_e)`.
pub fn wcc_edge_cost(spec: &GameSpec, edge: usize, i: usize, load: &LoadState) -> Result<f64> {
    let r = spec.commodity(i)?.r;
    let e = spec.edge(edge)?;
    if load.len() != spec.edge_count() {
        return Err(Error::EdgeSetMismatch { left: load.len(), right: spec.edge_count() });
    }
    Ok(e.cost.eval(r * load.get(edge)))
}

/// `sum_{e in path} c_e(r_i * load_e)`: the maximum path cost over the
/// possible-state box.
pub fn wcc_path_cost(spec: &GameSpec, i: usize, path: &Path, load: &LoadState) -> Result<f64> {
    path.edges().iter().map(|&e| wcc_edge_cost(spec, e, i, load)).sum()
}

/// The player-specific game in which commodity `i` faces `c_e(r_i t)`.
#[derive(Debug, Clone)]
pub struct WccGame<'a> {
    spec: &'a GameSpec,
    rvec: UncertaintyVector,
}

pub fn wcc_game<'a>(spec: &'a GameSpec, rvec: &UncertaintyVector) -> Result<WccGame<'a>> {
    if rvec.len() != spec.commodities().len() {
        return Err(Error::InvalidSpec(format!(
            "uncertainty vector has {} entries for {} commodities",
            rvec.len(),
            spec.commodities().len()
        )));
    }
    Ok(WccGame { spec, rvec: rvec.clone() })
}

impl<'a> WccGame<'a> {
    pub fn base(&self) -> &'a GameSpec {
        self.spec
    }

    pub fn rvec(&self) -> &UncertaintyVector {
        &self.rvec
    }

    /// Cost function commodity `i` perceives on `edge`.
    pub fn edge_cost_function(&self, i: usize, edge: usize) -> Result<CostFunction> {
        Ok(self.spec.edge(edge)?.cost.scaled(self.rvec.as_slice()[i]))
    }

    pub fn edge_cost(&self, i: usize, edge: usize, load: &LoadState) -> Result<f64> {
        Ok(self.spec.edge(edge)?.cost.eval(self.rvec.as_slice()[i] * load.get(edge)))
    }

    pub fn path_cost(&self, i: usize, path: &Path, load: &LoadState) -> Result<f64> {
        let r = self.rvec.as_slice()[i];
        path.edges()
            .iter()
            .map(|&e| Ok(self.spec.edge(e)?.cost.eval(r * load.get(e))))
            .sum()
    }

    /// With homogeneous uncertainty the modified game is an ordinary routing
    /// game with costs `c_e(r t)`.
    pub fn as_routing_game(&self) -> Option<GameSpec> {
        let r = self.rvec.common()?;
        let costs = self.spec.edges().iter().map(|e| e.cost.scaled(r)).collect();
        let ones = vec![1.0; self.spec.commodities().len()];
        self.spec.with_costs(costs).and_then(|g| g.with_uncertainties(&ones)).ok()
    }
}

fn require_rsg(spec: &GameSpec) -> Result<()> {
    if !spec.is_rsg() {
        return Err(Error::NotAnRsg);
    }
    if spec.edge_count() < 2 {
        return Err(Error::FewerThanTwoEdges);
    }
    Ok(())
}

/// `c_e(r load_e) - min_{d != e} c_d(load_d / r)` on a resource selection
/// game. The minimum ranges over every other resource, occupied or not.
pub fn wcr_cost_rsg(spec: &GameSpec, r: f64, edge: usize, load: &LoadState) -> Result<RegretValue> {
    require_rsg(spec)?;
    spec.edge(edge)?;
    if load.len() != spec.edge_count() {
        return Err(Error::EdgeSetMismatch { left: load.len(), right: spec.edge_count() });
    }
    let edges = spec.edges();
    let best_other = (0..edges.len())
        .filter(|&d| d != edge)
        .map(|d| edges[d].cost.eval(load.get(d) / r))
        .fold(f64::INFINITY, f64::min);
    Ok(edges[edge].cost.eval(r * load.get(edge)) - best_other)
}

/// WCR of every resource.
pub fn wcr_all(spec: &GameSpec, r: f64, load: &LoadState) -> Result<Vec<RegretValue>> {
    require_rsg(spec)?;
    if load.len() != spec.edge_count() {
        return Err(Error::EdgeSetMismatch { left: load.len(), right: spec.edge_count() });
    }
    let edges = spec.edges();
    let low: Vec<f64> = edges.iter().zip(load.as_slice()).map(|(e, &s)| e.cost.eval(s / r)).collect();
    // Lowest and second-lowest optimistic costs give every "min over d != e".
    let (mut w, mut w2) = (usize::MAX, usize::MAX);
    for (k, &v) in low.iter().enumerate() {
        if w == usize::MAX || v < low[w] {
            w2 = w;
            w = k;
        } else if w2 == usize::MAX || v < low[w2] {
            w2 = k;
        }
    }
    Ok(edges
        .iter()
        .zip(load.as_slice())
        .enumerate()
        .map(|(k, (e, &s))| e.cost.eval(r * s) - if k == w { low[w2] } else { low[w] })
        .collect())
}

/// Whether resource `e` counts as occupied.
pub fn occupied(spec: &GameSpec, load: &LoadState, e: usize) -> bool {
    load.get(e) > OCCUPANCY * spec.total_mass()
}

/// Maximum WCR over occupied resources.
pub fn max_regret(spec: &GameSpec, r: f64, load: &LoadState) -> Result<RegretValue> {
    let wcr = wcr_all(spec, r, load)?;
    wcr.iter()
        .enumerate()
        .filter(|&(e, _)| occupied(spec, load, e))
        .map(|(_, &v)| v)
        .reduce(f64::max)
        .ok_or(Error::EmptyState)
}

/// Which alternatives the general regret compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternatives {
    /// Every path of the commodity, including the evaluated one.
    All,
    /// Every other path.
    Others,
}

/// Worst-case regret of `path` for commodity `i` on a general network:
/// `max_{f'} [ sum_{e in f \ f'} c_e(r load_e) - sum_{e in f' \ f} c_e(load_e / r) ]`.
/// Shared edges see the same adversarial load in both terms and cancel.
pub fn wcr_path_cost_general(
    spec: &GameSpec,
    i: usize,
    path: &Path,
    load: &LoadState,
    alternatives: Alternatives,
) -> Result<RegretValue> {
    let r = spec.commodity(i)?.r;
    if load.len() != spec.edge_count() {
        return Err(Error::EdgeSetMismatch { left: load.len(), right: spec.edge_count() });
    }
    let mut best = f64::NEG_INFINITY;
    for alt in spec.enumerate_paths(i)? {
        if alternatives == Alternatives::Others && &alt == path {
            continue;
        }
        let mut v = 0.0;
        for &e in path.edges().iter().filter(|e| !alt.contains(**e)) {
            v += spec.edge(e)?.cost.eval(r * load.get(e));
        }
        for &e in alt.edges().iter().filter(|e| !path.contains(**e)) {
            v -= spec.edge(e)?.cost.eval(load.get(e) / r);
        }
        best = best.max(v);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::instances::{parallel_links, pigou};
    use crate::game::{Commodity, Edge};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn load(v: &[f64]) -> LoadState {
        LoadState::new(v.to_vec()).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(state_distance(&load(&[1.0, 3.0]), &load(&[1.0, 3.0])).unwrap(), 0.0);
        assert_eq!(state_distance(&load(&[1.0, 1.0]), &load(&[2.0, 0.5])).unwrap(), 1.0);
        assert_eq!(state_distance(&load(&[1.0]), &load(&[0.0])).unwrap(), f64::INFINITY);
        assert_eq!(state_distance(&load(&[0.0, 2.0]), &load(&[0.0, 2.0])).unwrap(), 0.0);
        assert!(matches!(
            state_distance(&load(&[1.0]), &load(&[1.0, 2.0])),
            Err(Error::EdgeSetMismatch { .. })
        ));
    }

    #[test]
    fn possibility_examples() {
        let reference = load(&[1.0, 1.0]);
        assert!(is_possible(&reference, &reference, 1.0).unwrap());
        assert!(is_possible(&load(&[2.0, 0.5]), &reference, 2.0).unwrap());
        assert!(!is_possible(&load(&[2.01, 1.0]), &reference, 2.0).unwrap());
    }

    #[test]
    fn accessibility_is_not_transitive() {
        let (a, b, c) = (load(&[1.0]), load(&[2.0]), load(&[4.0]));
        assert!(is_possible(&b, &a, 2.0).unwrap());
        assert!(is_possible(&c, &b, 2.0).unwrap());
        assert!(!is_possible(&c, &a, 2.0).unwrap());
    }

    #[test]
    fn wcc_examples() {
        let g = pigou(1.0, 1.0).unwrap().with_uncertainties(&[2.0]).unwrap();
        let l = load(&[0.5, 0.5]);
        assert_eq!(wcc_edge_cost(&g, 1, 0, &l).unwrap(), 1.0);
        assert_eq!(wcc_edge_cost(&g, 0, 0, &load(&[123.0, 0.0])).unwrap(), 1.0);
        assert_eq!(wcc_path_cost(&g, 0, &Path(vec![1]), &load(&[0.0, 1.0])).unwrap(), 2.0);
        let g1 = pigou(1.0, 1.0).unwrap();
        assert_eq!(
            wcc_path_cost(&g1, 0, &Path(vec![1]), &l).unwrap(),
            g1.path_cost(&Path(vec![1]), &l).unwrap()
        );
    }

    #[test]
    fn wcc_closed_form_dominates_sampled_box() {
        let c = |a, b| CostFunction::affine(a, b).unwrap();
        let g = GameSpec::new(
            vec!["u".into(), "m".into(), "v".into()],
            vec![
                Edge { id: "a".into(), from: 0, to: 1, cost: c(1.3, 0.2) },
                Edge { id: "b".into(), from: 1, to: 2, cost: CostFunction::polynomial(vec![(0.7, 2.0), (0.1, 0.0)]).unwrap() },
            ],
            vec![Commodity { source: 0, target: 2, mass: 1.0, r: 1.8 }],
        )
        .unwrap();
        let base = load(&[0.6, 0.9]);
        let path = Path(vec![0, 1]);
        let closed = wcc_path_cost(&g, 0, &path, &base).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut best = f64::NEG_INFINITY;
        for _ in 0..10_000 {
            let s: Vec<f64> = base
                .as_slice()
                .iter()
                .map(|&x| rng.gen_range(x / 1.8..=x * 1.8))
                .collect();
            let cand = load(&s);
            assert!(is_possible(&cand, &base, 1.8).unwrap());
            best = best.max(g.path_cost(&path, &cand).unwrap());
        }
        assert!(best <= closed + 1e-12);
        assert!(best > closed - 0.05, "sampler should approach the corner");
    }

    #[test]
    fn wcc_game_views() {
        let g = pigou(1.0, 1.0).unwrap();
        let ones = UncertaintyVector::homogeneous(1.0, 1).unwrap();
        let view = wcc_game(&g, &ones).unwrap();
        assert_eq!(view.as_routing_game().unwrap(), g);

        let affine = parallel_links(vec![CostFunction::affine(1.5, 0.3).unwrap()], 1.0, 1.0).unwrap();
        let h = wcc_game(&affine, &UncertaintyVector::homogeneous(3.0, 1).unwrap())
            .unwrap()
            .as_routing_game()
            .unwrap();
        assert_eq!(h.edges()[0].cost.as_affine(), Some((4.5, 0.3)));

        let two = GameSpec::new(
            g.nodes().to_vec(),
            g.edges().to_vec(),
            vec![
                Commodity { source: 0, target: 1, mass: 0.5, r: 1.0 },
                Commodity { source: 0, target: 1, mass: 0.5, r: 1.0 },
            ],
        )
        .unwrap();
        let rv = UncertaintyVector::new(vec![1.0, 2.0]).unwrap();
        let view = wcc_game(&two, &rv).unwrap();
        assert_eq!(view.edge_cost_function(0, 1).unwrap().as_affine(), Some((1.0, 0.0)));
        assert_eq!(view.edge_cost_function(1, 1).unwrap().as_affine(), Some((2.0, 0.0)));
        assert!(view.as_routing_game().is_none());
    }

    #[test]
    fn wcr_examples() {
        let g = pigou(1.0, 1.0).unwrap();
        let l = load(&[0.0, 1.0]);
        assert_eq!(wcr_cost_rsg(&g, 2.0, 1, &l).unwrap(), 1.0);
        assert_eq!(wcr_cost_rsg(&g, 2.0, 0, &l).unwrap(), 0.5);
        assert_eq!(max_regret(&g, 2.0, &l).unwrap(), 1.0);

        let flat = parallel_links(
            vec![CostFunction::constant(1.0).unwrap(), CostFunction::constant(1.0).unwrap()],
            1.0,
            1.0,
        )
        .unwrap();
        let l = load(&[0.4, 0.6]);
        assert_eq!(wcr_cost_rsg(&flat, 1.0, 0, &l).unwrap(), 0.0);
        assert_eq!(wcr_cost_rsg(&flat, 1.0, 1, &l).unwrap(), 0.0);
        assert_eq!(max_regret(&flat, 1.0, &load(&[1.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn wcr_equalizes_at_pigou_equilibrium() {
        let g = pigou(1.0, 1.0).unwrap();
        let s2 = 2.0 / (2.0 + 0.5);
        let l = load(&[1.0 - s2, s2]);
        let w = wcr_all(&g, 2.0, &l).unwrap();
        assert!((w[0] - w[1]).abs() < 1e-15);
    }

    #[test]
    fn wcr_errors() {
        let single = parallel_links(vec![CostFunction::constant(1.0).unwrap()], 1.0, 1.0).unwrap();
        assert!(matches!(wcr_cost_rsg(&single, 2.0, 0, &load(&[1.0])), Err(Error::FewerThanTwoEdges)));
        let c = CostFunction::constant(1.0).unwrap();
        let series = GameSpec::new(
            vec!["u".into(), "m".into(), "v".into()],
            vec![
                Edge { id: "a".into(), from: 0, to: 1, cost: c.clone() },
                Edge { id: "b".into(), from: 1, to: 2, cost: c },
            ],
            vec![Commodity { source: 0, target: 2, mass: 1.0, r: 1.0 }],
        )
        .unwrap();
        assert!(matches!(wcr_cost_rsg(&series, 2.0, 0, &load(&[1.0, 1.0])), Err(Error::NotAnRsg)));
        let g = pigou(1.0, 1.0).unwrap();
        assert!(matches!(max_regret(&g, 2.0, &load(&[0.0, 0.0])), Err(Error::EmptyState)));
    }

    #[test]
    fn general_regret_reduces_to_rsg_formula() {
        let costs = vec![
            CostFunction::affine(1.0, 0.2).unwrap(),
            CostFunction::affine(0.4, 0.5).unwrap(),
            CostFunction::polynomial(vec![(2.0, 2.0)]).unwrap(),
        ];
        let g = parallel_links(costs, 1.0, 2.5).unwrap();
        let l = load(&[0.2, 0.5, 0.3]);
        for e in 0..3 {
            let p = Path(vec![e]);
            let general = wcr_path_cost_general(&g, 0, &p, &l, Alternatives::Others).unwrap();
            assert_eq!(general, wcr_cost_rsg(&g, 2.5, e, &l).unwrap());
            let with_self = wcr_path_cost_general(&g, 0, &p, &l, Alternatives::All).unwrap();
            assert!(with_self >= 0.0);
            assert!(with_self >= general);
        }
    }

    #[test]
    fn general_regret_symmetric_diamond() {
        let c = CostFunction::affine(1.0, 0.5).unwrap();
        let e = |id: &str, from, to| Edge { id: id.into(), from, to, cost: c.clone() };
        let g = GameSpec::new(
            vec!["u".into(), "a".into(), "b".into(), "v".into()],
            vec![e("ua", 0, 1), e("av", 1, 3), e("ub", 0, 2), e("bv", 2, 3)],
            vec![Commodity { source: 0, target: 3, mass: 1.0, r: 2.0 }],
        )
        .unwrap();
        let l = load(&[0.5, 0.5, 0.5, 0.5]);
        let paths = g.enumerate_paths(0).unwrap();
        let a = wcr_path_cost_general(&g, 0, &paths[0], &l, Alternatives::Others).unwrap();
        let b = wcr_path_cost_general(&g, 0, &paths[1], &l, Alternatives::Others).unwrap();
        assert_eq!(a, b);
    }
}
