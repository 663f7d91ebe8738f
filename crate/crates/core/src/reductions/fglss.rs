use serde::{Deserialize, Serialize};

use crate::csp::{CspInstance, Label};
use crate::error::{Error, Result};
use crate::graph::SimpleGraph;

/// A vertex `(e, σ_u, σ_v)` of the FGLSS graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FglssVertex {
    pub edge_id: usize,
    pub label_u: Label,
    pub label_v: Label,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FglssGraph {
    pub graph: SimpleGraph,
    pub vertices: Vec<FglssVertex>,
}

/// FGLSS graph of a bipartite instance.
///
/// One vertex per edge and allowed pair (edges in id order, pairs
/// lexicographic); two vertices are adjacent iff they share a CSP vertex on
/// which their labels differ. Vertices are keyed by edge id, so parallel
/// constraints contribute separate groups. `indep` of the result equals the
/// number of edges satisfied by an optimal assignment, and the graph is
/// `(d_A + d_B)`-claw-free when the instance is `(d_A, d_B)`-bounded.
pub fn fglss(inst: &CspInstance) -> Result<FglssGraph> {
    if inst.bipartition().is_none() {
        return Err(Error::Precondition("FGLSS construction expects a bipartite instance".into()));
    }
    if inst.edge_count() == 0 {
        return Err(Error::Degenerate("instance has no edges".into()));
    }
    let mut vertices = Vec::new();
    // per CSP vertex: (fglss vertex, label placed on it)
    let mut touching: Vec<Vec<(usize, Label)>> = vec![Vec::new(); inst.num_vertices()];
    for e in inst.edges() {
        for &(a, b) in &e.allowed {
            let x = vertices.len();
            vertices.push(FglssVertex {
                edge_id: e.id,
                label_u: a,
                label_v: b,
            });
            touching[e.u].push((x, a));
            touching[e.v].push((x, b));
        }
    }
    let mut edges = Vec::new();
    for group in &touching {
        for (i, &(x, lx)) in group.iter().enumerate() {
            for &(y, ly) in &group[i + 1..] {
                if lx != ly {
                    edges.push((x, y));
                }
            }
        }
    }
    let graph = SimpleGraph::from_edges(vertices.len(), edges)?;
    Ok(FglssGraph { graph, vertices })
}
