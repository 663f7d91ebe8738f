use serde::{Deserialize, Serialize};

use crate::csp::{CspInstance, Label, Vertex};
use crate::error::{Error, Result};
use crate::graph::SimpleGraph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelExtendedGraph {
    pub graph: SimpleGraph,
    /// `(v, σ)` for every graph vertex, grouped by `v`.
    pub vertices: Vec<(Vertex, Label)>,
}

/// Label-extended graph: one vertex per `(v, σ_v)`.
///
/// `(u, σ_u)` and `(v, σ_v)` are adjacent iff some constraint on `(u, v)`
/// rejects `(σ_u, σ_v)`, and the labels of each variable form a clique, so an
/// independent set picks at most one label per variable. `indep` of the result
/// equals `cval`, and it is `(d + 2)`-claw-free when the constraint graph has
/// maximum degree `d`.
pub fn label_extended(inst: &CspInstance, d: usize) -> Result<LabelExtendedGraph> {
    let max = inst.max_degree();
    if max > d {
        return Err(Error::Precondition(format!("constraint graph has degree {max} > {d}")));
    }
    let mut offset = Vec::with_capacity(inst.num_vertices());
    let mut vertices = Vec::new();
    for v in 0..inst.num_vertices() {
        offset.push(vertices.len());
        vertices.extend((0..inst.alphabet(v)).map(|s| (v, s)));
    }
    let mut edges = Vec::new();
    for v in 0..inst.num_vertices() {
        let k = inst.alphabet(v);
        for a in 0..k {
            for b in a + 1..k {
                edges.push((offset[v] + a, offset[v] + b));
            }
        }
    }
    for e in inst.edges() {
        for a in 0..inst.alphabet(e.u) {
            for b in 0..inst.alphabet(e.v) {
                if !e.accepts(a, b) {
                    edges.push((offset[e.u] + a, offset[e.v] + b));
                }
            }
        }
    }
    let graph = SimpleGraph::from_edges(vertices.len(), edges)?;
    Ok(LabelExtendedGraph { graph, vertices })
}
