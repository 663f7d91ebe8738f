use crate::csp::{Bipartition, Constraint, CspInstance};
use crate::error::Result;

use super::Transformed;

/// Bipartite doubling: vertex `v` gets copies `v` (side A) and `n + v` (side B);
/// constraint `k` on `(u, v)` becomes edge `2k` on `(u, n+v)` and edge `2k+1`
/// on `(v, n+u)` with the relation transposed, where `k` is the position in id order.
pub fn bipartite_double(inst: &CspInstance) -> Result<Transformed> {
    let n = inst.num_vertices();
    let origin: Vec<usize> = (0..2 * n).map(|x| x % n).collect();
    let alphabets = origin.iter().map(|&v| inst.alphabet(v)).collect();
    let mut edges = Vec::with_capacity(2 * inst.edge_count());
    for (k, e) in inst.edges().iter().enumerate() {
        edges.push(Constraint {
            id: 2 * k,
            u: e.u,
            v: n + e.v,
            allowed: e.allowed.clone(),
        });
        edges.push(Constraint {
            id: 2 * k + 1,
            u: e.v,
            v: n + e.u,
            allowed: e.allowed.iter().map(|&(a, b)| (b, a)).collect(),
        });
    }
    let bipartition = Bipartition::new((0..n).collect(), (n..2 * n).collect());
    let instance = CspInstance::new(alphabets, edges, Some(bipartition))?;
    Ok(Transformed { instance, origin })
}
