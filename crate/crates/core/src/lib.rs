//! Nonatomic congestion games whose players face distance-based strict
//! uncertainty about edge loads.
//!
//! Players either minimize their worst-case cost (WCC) or their worst-case
//! regret (WCR) over the set of load states within a multiplicative radius
//! `r` of the actual one. The crate builds the induced games, computes their
//! equilibria, and measures the resulting price of anarchy.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod analytics;
pub mod cost;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod sampling;
pub mod spec_file;
pub mod uncertainty;
pub mod validation;

pub use cost::CostFunction;
pub use error::{Error, Result};
pub use game::{Commodity, Edge, FlowState, GameSpec, LoadState, Path};
pub use uncertainty::UncertaintyVector;
