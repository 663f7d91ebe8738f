use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;

/// Largest vertex count checked by subset enumeration.
pub const EXHAUSTIVE_POLYTOPE_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolytopeMethod {
    Exhaustive,
    DegreeBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeCheck {
    pub feasible: bool,
    pub method: PolytopeMethod,
    pub violating: Option<Vec<usize>>,
}

/// Checks that `x_e = 2/(d+1)` lies in the forest polytope of `g`:
/// `x(E(S)) ≤ |S| − 1` for every `S` with `|S| ≥ 2`.
///
/// Up to [`EXHAUSTIVE_POLYTOPE_LIMIT`] vertices every subset is tested (in
/// integers, `2|E(S)| ≤ (d+1)(|S|−1)`). Beyond that the degree bound decides:
/// `|E(S)| ≤ |S|(|S|−1)/2` covers `|S| ≤ d+1` and `|E(S)| ≤ d|S|/2` covers the rest.
pub fn check_forest_polytope(g: &SimpleGraph, d: usize) -> Result<PolytopeCheck> {
    let n = g.num_vertices();
    if let Some(v) = (0..n).find(|&v| g.degree(v) > d) {
        return Err(Error::Precondition(format!("vertex {v} has degree {} > {d}", g.degree(v))));
    }
    if n > EXHAUSTIVE_POLYTOPE_LIMIT {
        return Ok(PolytopeCheck {
            feasible: true,
            method: PolytopeMethod::DegreeBound,
            violating: None,
        });
    }
    let masks: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();
    let mut violating = None;
    for s in 1u32..(1u32 << n) {
        let size = s.count_ones() as usize;
        if size < 2 {
            continue;
        }
        let twice_edges: usize = (0..n)
            .filter(|&v| s >> v & 1 == 1)
            .map(|v| (masks[v] & s).count_ones() as usize)
            .sum();
        if twice_edges > (d + 1) * (size - 1) {
            violating = Some((0..n).filter(|&v| s >> v & 1 == 1).collect());
            break;
        }
    }
    Ok(PolytopeCheck {
        feasible: violating.is_none(),
        method: PolytopeMethod::Exhaustive,
        violating,
    })
}
