//! JSON game-spec files.
//!
//! ```json
//! {"nodes": ["s", "t"],
//!  "edges": [{"id": "e1", "from": "s", "to": "t", "cost": {"type": "affine", "a": 0, "b": 1}}],
//!  "commodities": [{"source": "s", "target": "t", "mass": 1, "r": 1}]}
//! ```
//!
//! Unknown keys are rejected at every level.

use serde::{Deserialize, Serialize};

use crate::cost::CostFunction;
use crate::error::{Error, Result};
use crate::game::{Commodity, Edge, GameSpec};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    nodes: Vec<String>,
    edges: Vec<EdgeEntry>,
    commodities: Vec<CommodityEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeEntry {
    id: String,
    from: String,
    to: String,
    cost: CostFunction,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CommodityEntry {
    source: String,
    target: String,
    mass: f64,
    #[serde(default = "one")]
    r: f64,
}

fn one() -> f64 {
    1.0
}

/// Parses and validates a spec document.
pub fn parse_spec(text: &str) -> Result<GameSpec> {
    let file: SpecFile = serde_json::from_str(text).map_err(|e| {
        Error::InvalidSpec(format!(
            "{e} (byte offset {})",
            byte_offset(text, e.line(), e.column())
        ))
    })?;
    let node = |id: &str, what: &str| {
        file.nodes
            .iter()
            .position(|n| n == id)
            .ok_or_else(|| Error::InvalidSpec(format!("{what}: unknown node {id:?}")))
    };
    let mut edges = Vec::with_capacity(file.edges.len());
    for e in &file.edges {
        e.cost
            .validate()
            .map_err(|err| Error::InvalidSpec(format!("edges[{:?}].cost: {err}", e.id)))?;
        edges.push(Edge {
            id: e.id.clone(),
            from: node(&e.from, &format!("edges[{:?}].from", e.id))?,
            to: node(&e.to, &format!("edges[{:?}].to", e.id))?,
            cost: e.cost.clone(),
        });
    }
    let mut commodities = Vec::with_capacity(file.commodities.len());
    for (k, c) in file.commodities.iter().enumerate() {
        commodities.push(Commodity {
            source: node(&c.source, &format!("commodities[{k}].source"))?,
            target: node(&c.target, &format!("commodities[{k}].target"))?,
            mass: c.mass,
            r: c.r,
        });
    }
    GameSpec::new(file.nodes.clone(), edges, commodities)
}

/// Serializes a spec in the same format `parse_spec` reads.
pub fn to_json(spec: &GameSpec) -> String {
    let nodes = spec.nodes();
    let file = SpecFile {
        nodes: nodes.to_vec(),
        edges: spec
            .edges()
            .iter()
            .map(|e| EdgeEntry {
                id: e.id.clone(),
                from: nodes[e.from].clone(),
                to: nodes[e.to].clone(),
                cost: e.cost.clone(),
            })
            .collect(),
        commodities: spec
            .commodities()
            .iter()
            .map(|c| CommodityEntry {
                source: nodes[c.source].clone(),
                target: nodes[c.target].clone(),
                mass: c.mass,
                r: c.r,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("spec serialization cannot fail")
}

/// serde_json reports 1-based line and column; convert to a byte offset.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}
