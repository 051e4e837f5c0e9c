//! Nonatomic routing games, their states, and the cost, potential and
//! social-cost functionals evaluated on load states.

use std::collections::BTreeMap;
use std::fmt;

use crate::cost::CostFunction;
use crate::error::{Error, Result};

/// Default upper bound on the number of paths enumerated per commodity.
pub const DEFAULT_PATH_CAP: usize = 100_000;

/// Relative tolerance on per-commodity mass conservation.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub cost: CostFunction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Commodity {
    pub source: usize,
    pub target: usize,
    pub mass: f64,
    /// Uncertainty parameter, at least 1.
    pub r: f64,
}

/// A directed network with edge costs and commodities. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    commodities: Vec<Commodity>,
    path_cap: usize,
}

/// A path as the ordered sequence of edge indices it traverses. Ordering is
/// lexicographic on that sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn edges(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.0.contains(&edge)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

/// Per-edge aggregated load, indexed by edge. May or may not be derivable
/// from a valid flow.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadState(Vec<f64>);

impl LoadState {
    pub fn new(loads: Vec<f64>) -> Result<Self> {
        if let Some((e, l)) = loads.iter().enumerate().find(|(_, l)| !(l.is_finite() && **l >= 0.0)) {
            return Err(Error::InvalidFlow(format!("load {l} on edge {e} is not finite and nonnegative")));
        }
        Ok(LoadState(loads))
    }

    pub fn zeros(edges: usize) -> Self {
        LoadState(vec![0.0; edges])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, edge: usize) -> f64 {
        self.0[edge]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub(crate) fn add(&mut self, edge: usize, delta: f64) {
        self.0[edge] = (self.0[edge] + delta).max(0.0);
    }
}

/// Path flows per commodity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FlowState {
    per_commodity: Vec<BTreeMap<Path, f64>>,
}

impl FlowState {
    pub fn new(per_commodity: Vec<BTreeMap<Path, f64>>) -> Self {
        FlowState { per_commodity }
    }

    pub fn commodity(&self, i: usize) -> &BTreeMap<Path, f64> {
        &self.per_commodity[i]
    }

    pub fn commodities(&self) -> &[BTreeMap<Path, f64>] {
        &self.per_commodity
    }

    pub fn mass_on(&self, i: usize, path: &Path) -> f64 {
        self.per_commodity[i].get(path).copied().unwrap_or(0.0)
    }

    /// Moves `mass` of commodity `i` from one path to another. Entries that
    /// drop to zero are removed.
    pub(crate) fn shift(&mut self, i: usize, from: &Path, to: &Path, mass: f64) {
        let map = &mut self.per_commodity[i];
        let left = map.get(from).copied().unwrap_or(0.0) - mass;
        if left <= 0.0 {
            map.remove(from);
        } else {
            map.insert(from.clone(), left);
        }
        *map.entry(to.clone()).or_insert(0.0) += mass;
    }
}

impl GameSpec {
    pub fn new(nodes: Vec<String>, edges: Vec<Edge>, commodities: Vec<Commodity>) -> Result<Self> {
        let spec = GameSpec { nodes, edges, commodities, path_cap: DEFAULT_PATH_CAP };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_path_cap(mut self, cap: usize) -> Self {
        self.path_cap = cap;
        self
    }

    fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for n in &self.nodes {
            if !seen.insert(n.as_str()) {
                return Err(Error::InvalidSpec(format!("duplicate node id {n:?}")));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (k, e) in self.edges.iter().enumerate() {
            if !seen.insert(e.id.as_str()) {
                return Err(Error::InvalidSpec(format!("duplicate edge id {:?}", e.id)));
            }
            if e.from >= self.nodes.len() || e.to >= self.nodes.len() {
                return Err(Error::InvalidSpec(format!("edge {k} references a missing node")));
            }
            e.cost.validate()?;
        }
        if self.commodities.is_empty() {
            return Err(Error::InvalidSpec("no commodities".into()));
        }
        for (i, c) in self.commodities.iter().enumerate() {
            if c.source >= self.nodes.len() || c.target >= self.nodes.len() {
                return Err(Error::InvalidSpec(format!("commodity {i} references a missing node")));
            }
            if c.source == c.target {
                return Err(Error::InvalidSpec(format!("commodity {i} has source == target")));
            }
            if !(c.mass.is_finite() && c.mass > 0.0) {
                return Err(Error::InvalidSpec(format!("commodity {i}: mass must be positive")));
            }
            if !(c.r.is_finite() && c.r >= 1.0) {
                return Err(Error::InvalidSpec(format!("commodity {i}: r must be >= 1")));
            }
            if !self.reachable(c.source, c.target) {
                return Err(Error::NoPath { commodity: i });
            }
        }
        Ok(())
    }

    fn reachable(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            if u == to {
                return true;
            }
            for e in self.edges.iter().filter(|e| e.from == u) {
                if !seen[e.to] {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        false
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Result<&Edge> {
        self.edges.get(e).ok_or(Error::UnknownEdge(e))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn commodities(&self) -> &[Commodity] {
        &self.commodities
    }

    pub fn commodity(&self, i: usize) -> Result<&Commodity> {
        self.commodities
            .get(i)
            .ok_or(Error::CommodityOutOfRange { index: i, count: self.commodities.len() })
    }

    pub fn total_mass(&self) -> f64 {
        self.commodities.iter().map(|c| c.mass).sum()
    }

    pub fn path_cap(&self) -> usize {
        self.path_cap
    }

    pub fn uncertainties(&self) -> Vec<f64> {
        self.commodities.iter().map(|c| c.r).collect()
    }

    /// Same network with every commodity's uncertainty replaced.
    pub fn with_uncertainties(&self, rvec: &[f64]) -> Result<GameSpec> {
        if rvec.len() != self.commodities.len() {
            return Err(Error::InvalidSpec(format!(
                "uncertainty vector has {} entries for {} commodities",
                rvec.len(),
                self.commodities.len()
            )));
        }
        let mut out = self.clone();
        for (c, &r) in out.commodities.iter_mut().zip(rvec) {
            c.r = r;
        }
        out.validate()?;
        Ok(out)
    }

    /// Same network with new edge costs.
    pub fn with_costs(&self, costs: Vec<CostFunction>) -> Result<GameSpec> {
        assert_eq!(costs.len(), self.edges.len());
        let mut out = self.clone();
        for (e, c) in out.edges.iter_mut().zip(costs) {
            e.cost = c;
        }
        out.validate()?;
        Ok(out)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// True for a resource selection game: every edge and every commodity
    /// runs between the same pair of nodes.
    pub fn is_rsg(&self) -> bool {
        let Some(first) = self.edges.first() else {
            return false;
        };
        self.edges.iter().all(|e| e.from == first.from && e.to == first.to)
            && self
                .commodities
                .iter()
                .all(|c| c.source == first.from && c.target == first.to)
    }

    /// All directed simple source-target paths of commodity `i`, sorted
    /// lexicographically by edge index sequence.
    pub fn enumerate_paths(&self, i: usize) -> Result<Vec<Path>> {
        let c = self.commodity(i)?;
        let mut out = Vec::new();
        let mut on_path = vec![false; self.nodes.len()];
        let mut current = Vec::new();
        on_path[c.source] = true;
        self.dfs(c.source, c.target, &mut on_path, &mut current, &mut out, i)?;
        if out.is_empty() {
            return Err(Error::NoPath { commodity: i });
        }
        out.sort();
        Ok(out)
    }

    fn dfs(
        &self,
        u: usize,
        target: usize,
        on_path: &mut [bool],
        current: &mut Vec<usize>,
        out: &mut Vec<Path>,
        commodity: usize,
    ) -> Result<()> {
        if u == target {
            if out.len() >= self.path_cap {
                return Err(Error::PathExplosion { commodity, cap: self.path_cap });
            }
            out.push(Path(current.clone()));
            return Ok(());
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e.from != u || on_path[e.to] {
                continue;
            }
            on_path[e.to] = true;
            current.push(k);
            self.dfs(e.to, target, on_path, current, out, commodity)?;
            current.pop();
            on_path[e.to] = false;
        }
        Ok(())
    }

    /// Paths for every commodity.
    pub fn all_paths(&self) -> Result<Vec<Vec<Path>>> {
        (0..self.commodities.len()).map(|i| self.enumerate_paths(i)).collect()
    }

    /// Checks that `path` is a contiguous source-target walk for commodity `i`.
    pub fn check_path(&self, i: usize, path: &Path) -> Result<()> {
        let c = self.commodity(i)?;
        let mut at = c.source;
        for &e in path.edges() {
            let edge = self.edge(e)?;
            if edge.from != at {
                return Err(Error::InvalidFlow(format!(
                    "path {path} of commodity {i} is not contiguous at edge {e}"
                )));
            }
            at = edge.to;
        }
        if at != c.target {
            return Err(Error::InvalidFlow(format!(
                "path {path} of commodity {i} does not end at its target"
            )));
        }
        Ok(())
    }

    /// Validates mass conservation and path shape.
    pub fn check_flow(&self, flow: &FlowState) -> Result<()> {
        if flow.per_commodity.len() != self.commodities.len() {
            return Err(Error::InvalidFlow(format!(
                "flow has {} commodities, spec has {}",
                flow.per_commodity.len(),
                self.commodities.len()
            )));
        }
        let tol = MASS_TOLERANCE * self.total_mass();
        for (i, (paths, c)) in flow.per_commodity.iter().zip(&self.commodities).enumerate() {
            let mut sum = 0.0;
            for (p, &m) in paths {
                if !(m.is_finite() && m >= 0.0) {
                    return Err(Error::InvalidFlow(format!("negative or non-finite mass {m} on {p}")));
                }
                self.check_path(i, p)?;
                sum += m;
            }
            if (sum - c.mass).abs() > tol {
                return Err(Error::InvalidFlow(format!(
                    "commodity {i} routes {sum} but has mass {}",
                    c.mass
                )));
            }
        }
        Ok(())
    }

    pub fn load_from_flow(&self, flow: &FlowState) -> Result<LoadState> {
        self.check_flow(flow)?;
        Ok(self.aggregate(flow))
    }

    /// Aggregates without validation; used inside solvers whose iterates are
    /// feasible by construction.
    pub(crate) fn aggregate(&self, flow: &FlowState) -> LoadState {
        let mut loads = vec![0.0; self.edges.len()];
        for paths in &flow.per_commodity {
            for (p, &m) in paths {
                for &e in p.edges() {
                    loads[e] += m;
                }
            }
        }
        LoadState(loads)
    }

    fn check_load(&self, load: &LoadState) -> Result<()> {
        if load.len() != self.edges.len() {
            return Err(Error::EdgeSetMismatch { left: load.len(), right: self.edges.len() });
        }
        Ok(())
    }

    /// `sum_{e in path} c_e(load_e)`.
    pub fn path_cost(&self, path: &Path, load: &LoadState) -> Result<f64> {
        self.check_load(load)?;
        path.edges()
            .iter()
            .map(|&e| Ok(self.edge(e)?.cost.eval(load.get(e))))
            .sum()
    }

    /// `sum_e load_e * c_e(load_e)`.
    pub fn social_cost(&self, load: &LoadState) -> Result<f64> {
        self.check_load(load)?;
        Ok(self
            .edges
            .iter()
            .zip(load.as_slice())
            .map(|(e, &s)| s * e.cost.eval(s))
            .sum())
    }

    /// Rosenthal potential `sum_e int_0^{load_e} c_e`.
    pub fn potential(&self, load: &LoadState) -> Result<f64> {
        self.potential_r(load, 1.0)
    }

    /// Potential of the game with edge costs `c_e(r t)`:
    /// `sum_e int_0^{load_e} c_e(r t) dt`, which for affine costs is
    /// `sum_e load_e (r a_e load_e / 2 + b_e)`.
    pub fn potential_r(&self, load: &LoadState, r: f64) -> Result<f64> {
        self.check_load(load)?;
        if !(r >= 1.0) {
            return Err(Error::OutOfRange { what: "r", value: r });
        }
        Ok(self
            .edges
            .iter()
            .zip(load.as_slice())
            .map(|(e, &s)| match e.cost.as_affine() {
                Some((a, b)) => s * (0.5 * r * a * s + b),
                None => e.cost.integral(r * s) / r,
            })
            .sum())
    }

    /// The game with costs `c_e(t) + t c_e'(t)`; its potential is the
    /// original social cost.
    pub fn taxation_modified_game(&self) -> Result<GameSpec> {
        let costs = self
            .edges
            .iter()
            .enumerate()
            .map(|(k, e)| e.cost.marginal().ok_or(Error::NonDifferentiableCost { edge: k }))
            .collect::<Result<Vec<_>>>()?;
        self.with_costs(costs)
    }

    pub fn require_differentiable(&self) -> Result<()> {
        match self.edges.iter().position(|e| !e.cost.is_differentiable()) {
            Some(k) => Err(Error::NonDifferentiableCost { edge: k }),
            None => Ok(()),
        }
    }

    pub fn require_affine(&self) -> Result<Vec<(f64, f64)>> {
        self.edges
            .iter()
            .enumerate()
            .map(|(k, e)| e.cost.as_affine().ok_or(Error::NonAffine { edge: k }))
            .collect()
    }
}

/// Builders for the small instances used throughout.
pub mod instances {
    use super::*;

    /// `n` parallel links between `s` and `t`, one commodity of mass `mass`.
    pub fn parallel_links(costs: Vec<CostFunction>, mass: f64, r: f64) -> Result<GameSpec> {
        let edges = costs
            .into_iter()
            .enumerate()
            .map(|(k, cost)| Edge { id: format!("e{}", k + 1), from: 0, to: 1, cost })
            .collect();
        GameSpec::new(
            vec!["s".into(), "t".into()],
            edges,
            vec![Commodity { source: 0, target: 1, mass, r }],
        )
    }

    /// Pigou's network: `c_1 = 1`, `c_2 = a t`, mass `n`.
    pub fn pigou(a: f64, n: f64) -> Result<GameSpec> {
        parallel_links(vec![CostFunction::constant(1.0)?, CostFunction::affine(a, 0.0)?], n, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::instances::*;
    use super::*;

    fn flow1(entries: Vec<(Vec<usize>, f64)>) -> FlowState {
        FlowState::new(vec![entries.into_iter().map(|(p, m)| (Path(p), m)).collect()])
    }

    fn diamond() -> GameSpec {
        let c = CostFunction::affine(1.0, 0.0).unwrap();
        let e = |id: &str, from, to| Edge { id: id.into(), from, to, cost: c.clone() };
        GameSpec::new(
            vec!["u".into(), "a".into(), "b".into(), "v".into()],
            vec![e("ub", 0, 2), e("ua", 0, 1), e("av", 1, 3), e("bv", 2, 3)],
            vec![Commodity { source: 0, target: 3, mass: 1.0, r: 1.0 }],
        )
        .unwrap()
    }

    #[test]
    fn paths_parallel_and_single() {
        let g = pigou(1.0, 1.0).unwrap();
        assert_eq!(g.enumerate_paths(0).unwrap(), vec![Path(vec![0]), Path(vec![1])]);
        let g = parallel_links(vec![CostFunction::constant(1.0).unwrap()], 1.0, 1.0).unwrap();
        assert_eq!(g.enumerate_paths(0).unwrap(), vec![Path(vec![0])]);
    }

    /// Independent oracle: brute-force all edge subsets ordered as sequences
    /// and keep the ones forming a u-v walk without repeated nodes.
    fn brute_force_paths(g: &GameSpec) -> Vec<Path> {
        let m = g.edge_count();
        let mut out = Vec::new();
        fn perms(prefix: &mut Vec<usize>, m: usize, g: &GameSpec, out: &mut Vec<Path>) {
            if !prefix.is_empty() && g.check_path(0, &Path(prefix.clone())).is_ok() {
                let mut nodes = vec![g.edges()[prefix[0]].from];
                nodes.extend(prefix.iter().map(|&e| g.edges()[e].to));
                let mut dedup = nodes.clone();
                dedup.sort();
                dedup.dedup();
                if dedup.len() == nodes.len() {
                    out.push(Path(prefix.clone()));
                }
            }
            if prefix.len() == m {
                return;
            }
            for e in 0..m {
                if !prefix.contains(&e) {
                    prefix.push(e);
                    perms(prefix, m, g, out);
                    prefix.pop();
                }
            }
        }
        perms(&mut Vec::new(), m, g, &mut out);
        out.sort();
        out
    }

    #[test]
    fn diamond_paths_match_exhaustive_oracle() {
        let g = diamond();
        let paths = g.enumerate_paths(0).unwrap();
        assert_eq!(paths, brute_force_paths(&g));
        assert_eq!(paths, vec![Path(vec![0, 3]), Path(vec![1, 2])]);
    }

    #[test]
    fn path_cap_and_commodity_range() {
        let g = diamond().with_path_cap(1);
        assert!(matches!(g.enumerate_paths(0), Err(Error::PathExplosion { .. })));
        assert!(matches!(diamond().enumerate_paths(3), Err(Error::CommodityOutOfRange { .. })));
    }

    #[test]
    fn unreachable_target_is_rejected() {
        let c = CostFunction::constant(1.0).unwrap();
        let r = GameSpec::new(
            vec!["u".into(), "v".into()],
            vec![Edge { id: "back".into(), from: 1, to: 0, cost: c }],
            vec![Commodity { source: 0, target: 1, mass: 1.0, r: 1.0 }],
        );
        assert!(matches!(r, Err(Error::NoPath { commodity: 0 })));
    }

    #[test]
    fn load_aggregation() {
        let g = pigou(1.0, 1.0).unwrap();
        let l = g.load_from_flow(&flow1(vec![(vec![0], 0.5), (vec![1], 0.5)])).unwrap();
        assert_eq!(l.as_slice(), &[0.5, 0.5]);

        let c = CostFunction::affine(1.0, 0.0).unwrap();
        let series = GameSpec::new(
            vec!["u".into(), "m".into(), "v".into()],
            vec![
                Edge { id: "e1".into(), from: 0, to: 1, cost: CostFunction::affine(1.0, 0.0).unwrap() },
                Edge { id: "e2".into(), from: 1, to: 2, cost: CostFunction::affine(0.0, 1.0).unwrap() },
            ],
            vec![Commodity { source: 0, target: 2, mass: 1.0, r: 1.0 }],
        )
        .unwrap();
        let l = series.load_from_flow(&flow1(vec![(vec![0, 1], 1.0)])).unwrap();
        assert_eq!(l.as_slice(), &[1.0, 1.0]);
        let two = LoadState::new(vec![2.0, 2.0]).unwrap();
        assert_eq!(series.path_cost(&Path(vec![0, 1]), &two).unwrap(), 3.0);

        let shared = GameSpec::new(
            vec!["u".into(), "v".into()],
            vec![Edge { id: "e".into(), from: 0, to: 1, cost: c }],
            vec![
                Commodity { source: 0, target: 1, mass: 0.3, r: 1.0 },
                Commodity { source: 0, target: 1, mass: 0.7, r: 1.0 },
            ],
        )
        .unwrap();
        let f = FlowState::new(vec![
            [(Path(vec![0]), 0.3)].into_iter().collect(),
            [(Path(vec![0]), 0.7)].into_iter().collect(),
        ]);
        assert_eq!(shared.load_from_flow(&f).unwrap().as_slice(), &[1.0]);
    }

    #[test]
    fn invalid_flows_are_rejected() {
        let g = pigou(1.0, 1.0).unwrap();
        assert!(matches!(
            g.load_from_flow(&flow1(vec![(vec![0], 0.5), (vec![1], 0.4)])),
            Err(Error::InvalidFlow(_))
        ));
        assert!(matches!(
            g.load_from_flow(&flow1(vec![(vec![0, 1], 1.0)])),
            Err(Error::InvalidFlow(_))
        ));
    }

    #[test]
    fn pigou_costs_and_functionals() {
        let g = pigou(1.0, 1.0).unwrap();
        let half = LoadState::new(vec![0.5, 0.5]).unwrap();
        let all2 = LoadState::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(g.path_cost(&Path(vec![0]), &LoadState::new(vec![7.0, 0.0]).unwrap()).unwrap(), 1.0);
        assert_eq!(g.path_cost(&Path(vec![1]), &half).unwrap(), 0.5);
        assert!(matches!(g.path_cost(&Path(vec![5]), &half), Err(Error::UnknownEdge(5))));

        assert_eq!(g.social_cost(&all2).unwrap(), 1.0);
        assert_eq!(g.social_cost(&half).unwrap(), 0.75);
        assert_eq!(g.social_cost(&LoadState::zeros(2)).unwrap(), 0.0);

        assert_eq!(g.potential(&all2).unwrap(), 0.5);
        assert_eq!(g.potential(&half).unwrap(), 0.625);
        assert_eq!(g.potential(&LoadState::zeros(2)).unwrap(), 0.0);

        assert_eq!(g.potential_r(&half, 1.0).unwrap(), g.potential(&half).unwrap());
        assert_eq!(g.potential_r(&all2, 2.0).unwrap(), 1.0);
        assert_eq!(g.potential_r(&half, 4.0).unwrap(), 1.0);
    }

    #[test]
    fn potential_r_for_nonaffine_uses_scaled_integral() {
        let g = parallel_links(vec![CostFunction::polynomial(vec![(1.0, 2.0)]).unwrap()], 1.0, 1.0)
            .unwrap();
        let l = LoadState::new(vec![1.5]).unwrap();
        // int_0^s (r t)^2 dt = r^2 s^3 / 3
        let want = 9.0 * 1.5f64.powi(3) / 3.0;
        assert!((g.potential_r(&l, 3.0).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn taxation_modification() {
        let g = pigou(1.0, 1.0).unwrap().taxation_modified_game().unwrap();
        assert_eq!(g.edges()[0].cost.as_affine(), Some((0.0, 1.0)));
        assert_eq!(g.edges()[1].cost.as_affine(), Some((2.0, 0.0)));
        let tab = parallel_links(
            vec![CostFunction::tabulated(vec![(0.0, 1.0), (1.0, 2.0)]).unwrap()],
            1.0,
            1.0,
        )
        .unwrap();
        assert!(matches!(tab.taxation_modified_game(), Err(Error::NonDifferentiableCost { edge: 0 })));
    }

    #[test]
    fn edge_set_mismatch() {
        let g = pigou(1.0, 1.0).unwrap();
        assert!(matches!(
            g.social_cost(&LoadState::zeros(3)),
            Err(Error::EdgeSetMismatch { left: 3, right: 2 })
        ));
    }

    #[test]
    fn rsg_detection() {
        assert!(pigou(1.0, 1.0).unwrap().is_rsg());
        assert!(!diamond().is_rsg());
    }
}
