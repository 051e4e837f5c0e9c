//! Reference instances: a three-resource best-response cycle under WCC
//! costs, and the Poisson confidence-interval table that motivates the
//! multiplicative uncertainty radius.

use crate::cost::CostFunction;
use crate::equilibrium::{best_response_dynamics, DynamicsConfig, DynamicsTrace, MoveRule, Termination, TraceStep};
use crate::error::{Error, Result};
use crate::game::{Commodity, Edge, FlowState, GameSpec, LoadState, Path};
use crate::uncertainty::UncertaintyVector;

/// Resource edges come first, in this order.
pub const RESOURCES: [char; 3] = ['x', 'y', 'z'];

/// States visited by full-block best responses, starting from the first.
pub const CYCLE_STATES: [&str; 6] = ["(y,x,x)", "(z,x,x)", "(z,z,x)", "(z,z,y)", "(y,z,y)", "(y,x,y)"];

/// Three types of unit mass on resources `x, y, z`, with uncertainty
/// `(1, 10, 10)`. Type 1 may use `y, z`, type 2 `x, z` and type 3 `x, y`;
/// each reaches its resources from its own source through zero-cost
/// connectors, so every path is `connector, resource`.
#[derive(Debug, Clone)]
pub struct CycleInstance {
    pub spec: GameSpec,
    pub rvec: UncertaintyVector,
}

/// `(resource, argument, value)`: the chain of eleven strictly increasing
/// cost values.
const CHAIN: [(char, f64, f64); 11] = [
    ('z', 1.0, 1.0),
    ('x', 1.0, 2.0),
    ('y', 1.0, 3.0),
    ('y', 2.0, 4.0),
    ('z', 2.0, 5.0),
    ('y', 10.0, 6.0),
    ('x', 10.0, 7.0),
    ('z', 10.0, 8.0),
    ('z', 20.0, 9.0),
    ('x', 20.0, 10.0),
    ('y', 20.0, 11.0),
];

/// Per move: type, resource left, resource entered, loads of the two
/// resources as seen by the mover before and after (unscaled).
const MOVES: [(usize, char, char, f64, f64); 6] = [
    (0, 'y', 'z', 1.0, 1.0),
    (1, 'x', 'z', 2.0, 2.0),
    (2, 'x', 'y', 1.0, 1.0),
    (0, 'z', 'y', 2.0, 2.0),
    (1, 'z', 'x', 1.0, 1.0),
    (2, 'y', 'x', 2.0, 2.0),
];

const ALLOWED: [[char; 2]; 3] = [['y', 'z'], ['x', 'z'], ['x', 'y']];
const R: [f64; 3] = [1.0, 10.0, 10.0];

fn resource(c: char) -> usize {
    RESOURCES.iter().position(|&r| r == c).expect("known resource")
}

pub fn milchtaich_cycle_instance() -> Result<CycleInstance> {
    let mut costs = Vec::new();
    for name in RESOURCES {
        let points: Vec<(f64, f64)> = CHAIN.iter().filter(|c| c.0 == name).map(|c| (c.1, c.2)).collect();
        costs.push(CostFunction::tabulated(points)?);
    }
    let mut nodes: Vec<String> = vec!["s1".into(), "s2".into(), "s3".into()];
    nodes.extend(RESOURCES.iter().map(|c| format!("h{c}")));
    nodes.push("t".into());
    let sink = nodes.len() - 1;
    let hub = |c: char| 3 + resource(c);
    let mut edges: Vec<Edge> = RESOURCES
        .iter()
        .zip(costs)
        .map(|(&c, cost)| Edge { id: c.to_string(), from: hub(c), to: sink, cost })
        .collect();
    for (i, allowed) in ALLOWED.iter().enumerate() {
        for &c in allowed {
            edges.push(Edge {
                id: format!("{}{c}", i + 1),
                from: i,
                to: hub(c),
                cost: CostFunction::constant(0.0)?,
            });
        }
    }
    let commodities = (0..3).map(|i| Commodity { source: i, target: sink, mass: 1.0, r: R[i] }).collect();
    let spec = GameSpec::new(nodes, edges, commodities)?;

    let cost = |c: char, t: f64| spec.edges()[resource(c)].cost.eval(t);
    for w in CHAIN.windows(2) {
        assert!(cost(w[0].0, w[0].1) < cost(w[1].0, w[1].1), "cost chain broken at {:?}", w);
    }
    for (i, from, to, before, after) in MOVES {
        let gain = cost(from, R[i] * before) - cost(to, R[i] * after);
        assert!(gain >= 0.5, "type {} move {from}->{to} gains only {gain}", i + 1);
    }
    Ok(CycleInstance { spec, rvec: UncertaintyVector::new(R.to_vec())? })
}

/// `(a,b,c)`: the resource of each type, or `?` for a type whose mass is
/// split.
pub fn state_label(spec: &GameSpec, flow: &FlowState) -> String {
    let quantum = 1e-9 * spec.total_mass();
    let parts: Vec<String> = flow
        .commodities()
        .iter()
        .map(|paths| {
            let used: Vec<char> = paths
                .iter()
                .filter(|(_, &m)| m > quantum)
                .map(|(p, _)| RESOURCES[*p.edges().iter().find(|&&e| e < 3).expect("path has a resource")])
                .collect();
            match used.as_slice() {
                [c] => c.to_string(),
                _ => "?".into(),
            }
        })
        .collect();
    format!("({})", parts.join(","))
}

/// Labels of the start state and of the state after every step.
pub fn trace_labels(spec: &GameSpec, trace: &DynamicsTrace) -> Vec<String> {
    let mut flow = trace.start.clone();
    let mut out = vec![state_label(spec, &flow)];
    for s in &trace.steps {
        flow.shift(s.commodity, &s.from, &s.to, s.mass);
        out.push(state_label(spec, &flow));
    }
    out
}

fn path_to(inst: &CycleInstance, i: usize, c: char) -> Path {
    let connector = inst.spec.edge_index(&format!("{}{c}", i + 1)).expect("connector exists");
    Path(vec![connector, resource(c)])
}

/// Full-type block moves from `(y,x,x)` with the atomic improvement rule.
/// Fails unless the six states are visited in order and the seventh state is
/// the first again.
pub fn run_cycle_demo() -> Result<DynamicsTrace> {
    let inst = milchtaich_cycle_instance()?;
    let cfg = DynamicsConfig { rule: MoveRule::Atomic, ..DynamicsConfig::new(1.0, CYCLE_STATES.len()) };
    let trace = best_response_dynamics(&inst.spec, &inst.rvec, cfg)?;
    let labels = trace_labels(&inst.spec, &trace);
    let expected: Vec<&str> = CYCLE_STATES.iter().chain([&CYCLE_STATES[0]]).copied().collect();
    if labels != expected {
        return Err(Error::CycleNotReproduced(format!("visited {}", labels.join(" -> "))));
    }
    if trace.termination != (Termination::Revisit { first_seen: 0, at: CYCLE_STATES.len() }) {
        return Err(Error::CycleNotReproduced(format!("terminated with {:?}", trace.termination)));
    }
    Ok(trace)
}

/// As [`run_cycle_demo`], but type 1 makes its first move in `parts` equal
/// sub-blocks, each of which must be improving on its own. Returns the trace
/// from `(y,x,x)` back to `(y,x,x)`.
pub fn run_cycle_demo_split(parts: usize) -> Result<DynamicsTrace> {
    if parts == 0 {
        return Err(Error::NonPositiveInput("parts"));
    }
    let inst = milchtaich_cycle_instance()?;
    let spec = &inst.spec;
    let r = inst.rvec.as_slice();
    let start = FlowState::new(
        (0..3)
            .map(|i| [(path_to(&inst, i, if i == 0 { 'y' } else { 'x' }), 1.0)].into_iter().collect())
            .collect(),
    );
    let (from, to) = (path_to(&inst, 0, 'y'), path_to(&inst, 0, 'z'));
    let chunk = 1.0 / parts as f64;
    let mut flow = start.clone();
    let mut steps = Vec::new();
    for _ in 0..parts {
        let before = spec.load_from_flow(&flow)?;
        let mut next = flow.clone();
        next.shift(0, &from, &to, chunk.min(next.mass_on(0, &from)));
        let after = spec.load_from_flow(&next)?;
        let c_from = spec.edges()[resource('y')].cost.eval(r[0] * before.get(resource('y')));
        let c_to = spec.edges()[resource('z')].cost.eval(r[0] * after.get(resource('z')));
        if !(c_to < c_from) {
            return Err(Error::CycleNotReproduced(format!("type-1 sub-block not improving: {c_to} vs {c_from}")));
        }
        let mass = flow.mass_on(0, &from) - next.mass_on(0, &from);
        steps.push(step(spec, 0, &from, &to, mass, after, r[0])?);
        flow = next;
    }
    let cfg = DynamicsConfig { rule: MoveRule::Atomic, ..DynamicsConfig::new(1.0, CYCLE_STATES.len() - 1) };
    let rest = crate::equilibrium::best_response_dynamics_from(spec, &inst.rvec, flow, cfg)?;
    steps.extend(rest.steps);
    let trace = DynamicsTrace { start, steps, final_flow: rest.final_flow, termination: rest.termination };
    let labels = trace_labels(spec, &trace);
    let mut expected: Vec<&str> = vec![CYCLE_STATES[0]];
    expected.extend(std::iter::repeat_n("(?,x,x)", parts - 1));
    expected.extend(CYCLE_STATES[1..].iter().copied());
    expected.push(CYCLE_STATES[0]);
    if labels != expected {
        return Err(Error::CycleNotReproduced(format!("visited {}", labels.join(" -> "))));
    }
    Ok(trace)
}

fn step(spec: &GameSpec, i: usize, from: &Path, to: &Path, mass: f64, load: LoadState, r: f64) -> Result<TraceStep> {
    let metric = spec.potential_r(&load, r)?;
    Ok(TraceStep { commodity: i, from: from.clone(), to: to.clone(), mass, load, metric })
}

/// Chi-square quantile for 95% with one degree of freedom, `1.96^2`.
pub const DEFAULT_Z: f64 = 3.8416;

/// Reference `r` column of the 95% table for `t = 1..=6`.
pub const REFERENCE_R: [f64; 6] = [5.6653111, 3.6464040, 2.9403558, 2.5714977, 2.3411563, 2.1819154];

/// Interval `[x1, x2]` of Poisson means compatible with an observed count
/// `t`, and the multiplicative radius `r = sqrt(x2/x1)` around `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonRow {
    pub t: f64,
    pub r: f64,
    pub x1: f64,
    pub x2: f64,
}

impl PoissonRow {
    pub fn t_over_r(&self) -> f64 {
        self.t / self.r
    }

    pub fn t_times_r(&self) -> f64 {
        self.t * self.r
    }

    /// `|x1 - t/r|` and `|x2 - t r|`.
    pub fn residuals(&self) -> (f64, f64) {
        ((self.x1 - self.t_over_r()).abs(), (self.x2 - self.t_times_r()).abs())
    }

    pub fn csv_line(&self) -> String {
        format!("{},{},{},{},{},{}", self.t, self.r, self.x1, self.t_over_r(), self.x2, self.t_times_r())
    }
}

pub const POISSON_CSV_HEADER: &str = "t,r,x1,t_over_r,x2,t_times_r";

/// Roots of `(t - x)^2 / x = z`: `x = t + z/2 -+ sqrt(z) sqrt(t + z/4)`.
pub fn poisson_ci(t: f64, z: f64) -> Result<PoissonRow> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositiveInput("t"));
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::NonPositiveInput("z"));
    }
    let centre = t + z / 2.0;
    let half = z.sqrt() * (t + z / 4.0).sqrt();
    // x1 = t^2 / x2 avoids cancellation in centre - half for large t.
    let x2 = centre + half;
    let x1 = t * t / x2;
    Ok(PoissonRow { t, r: (x2 / x1).sqrt(), x1, x2 })
}

/// Rows for `t = 1..=t_max`.
pub fn poisson_table(t_max: u32, z: f64) -> Result<Vec<PoissonRow>> {
    if t_max < 1 {
        return Err(Error::OutOfRange { what: "t_max", value: t_max as f64 });
    }
    (1..=t_max).map(|t| poisson_ci(t as f64, z)).collect()
}
