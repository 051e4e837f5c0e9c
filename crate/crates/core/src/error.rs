use thiserror::Error;

use crate::equilibrium::DynamicsTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game spec: {0}")]
    InvalidSpec(String),
    #[error("invalid cost function: {0}")]
    InvalidCost(String),
    #[error("commodity index {index} out of range ({count} commodities)")]
    CommodityOutOfRange { index: usize, count: usize },
    #[error("commodity {commodity} has more than {cap} source-target paths")]
    PathExplosion { commodity: usize, cap: usize },
    #[error("commodity {commodity} has no source-target path")]
    NoPath { commodity: usize },
    #[error("invalid flow: {0}")]
    InvalidFlow(String),
    #[error("unknown edge index {0}")]
    UnknownEdge(usize),
    #[error("cost on edge {edge} is not differentiable")]
    NonDifferentiableCost { edge: usize },
    #[error("load states cover different edge sets ({left} vs {right} edges)")]
    EdgeSetMismatch { left: usize, right: usize },
    #[error("game is not a resource selection game (parallel links, shared source and target)")]
    NotAnRsg,
    #[error("worst-case regret needs at least two resources")]
    FewerThanTwoEdges,
    #[error("load state has no occupied edge")]
    EmptyState,
    #[error("cost on edge {edge} is not affine")]
    NonAffine { edge: usize },
    #[error("cost on edge {edge} is not r-convex for r = {r}")]
    NotRConvex { edge: usize, r: f64 },
    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("input must be positive: {0}")]
    NonPositiveInput(&'static str),
    #[error("regret descent could not find a strictly improving move after {halvings} halvings")]
    DescentStalled { halvings: u32 },
    #[error("best-response dynamics did not reach an equilibrium after {} moves", .trace.steps.len())]
    NonConvergence { trace: Box<DynamicsTrace> },
    #[error("solver stopped after {iterations} iterations with gap {gap}")]
    NotConverged { iterations: usize, gap: f64 },
    #[error("cycle not reproduced: {0}")]
    CycleNotReproduced(String),
}
