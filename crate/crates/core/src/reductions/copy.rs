use crate::csp::{biregular_degrees, Bipartition, Constraint, CspInstance};
use crate::error::{Error, Result};

use super::Transformed;

/// Blows a `(d₁, d₂)`-biregular instance up into a `(c₂d₁d₂, c₁d₁d₂)`-biregular one.
///
/// Left vertex `a` becomes `a × [d₁] × [c₁]`, right vertex `b` becomes
/// `b × [d₂] × [c₂]`, and every edge `(a, b)` is replaced by all
/// `d₁·c₁·d₂·c₂` combinations carrying the same relation. The value is
/// unchanged. New left vertices come first, in `(a, i, j)` lexicographic
/// order; edge ids follow `(edge id, i₁, j₁, i₂, j₂)` order.
pub fn copy_expand(inst: &CspInstance, c1: usize, c2: usize) -> Result<Transformed> {
    let (d1, d2) = biregular_degrees(inst)
        .ok_or_else(|| Error::Precondition("copy expansion needs a biregular bipartite instance".into()))?;
    if c1 == 0 || c2 == 0 {
        return Err(Error::Parameter(format!("copy counts must be positive, got c1={c1}, c2={c2}")));
    }
    let bp = inst.bipartition().expect("biregular implies bipartite");
    let mut left_pos = vec![usize::MAX; inst.num_vertices()];
    let mut right_pos = vec![usize::MAX; inst.num_vertices()];
    for (i, &a) in bp.left.iter().enumerate() {
        left_pos[a] = i;
    }
    for (i, &b) in bp.right.iter().enumerate() {
        right_pos[b] = i;
    }

    let left_count = bp.left.len() * d1 * c1;
    let right_count = bp.right.len() * d2 * c2;
    let left_id = |a: usize, i: usize, j: usize| (left_pos[a] * d1 + i) * c1 + j;
    let right_id = |b: usize, i: usize, j: usize| left_count + (right_pos[b] * d2 + i) * c2 + j;

    let mut origin = Vec::with_capacity(left_count + right_count);
    for &a in &bp.left {
        origin.extend(std::iter::repeat_n(a, d1 * c1));
    }
    for &b in &bp.right {
        origin.extend(std::iter::repeat_n(b, d2 * c2));
    }
    let alphabets = origin.iter().map(|&v| inst.alphabet(v)).collect();

    let mut edges = Vec::with_capacity(inst.edge_count() * d1 * c1 * d2 * c2);
    for e in inst.edges() {
        for i1 in 0..d1 {
            for j1 in 0..c1 {
                for i2 in 0..d2 {
                    for j2 in 0..c2 {
                        edges.push(Constraint {
                            id: edges.len(),
                            u: left_id(e.u, i1, j1),
                            v: right_id(e.v, i2, j2),
                            allowed: e.allowed.clone(),
                        });
                    }
                }
            }
        }
    }
    let bipartition = Bipartition::new((0..left_count).collect(), (left_count..left_count + right_count).collect());
    let instance = CspInstance::new(alphabets, edges, Some(bipartition))?;
    Ok(Transformed { instance, origin })
}
