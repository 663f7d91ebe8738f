//! `(d+1)/2`-approximation for Max 2-CSP on graphs of maximum degree `d`:
//! decompose the uniform point `2/(d+1)` of the forest polytope into forests,
//! solve each forest exactly, keep the best assignment.

mod decompose;
mod polytope;
mod tree_dp;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csp::{Assignment, CspInstance};
use crate::error::{Error, Result};
use crate::graph::SimpleGraph;

pub use polytope::{check_forest_polytope, PolytopeCheck, PolytopeMethod, EXHAUSTIVE_POLYTOPE_LIMIT};
pub use tree_dp::{tree_dp, TreeDpResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestPart {
    pub edges: BTreeSet<usize>,
    pub weight: f64,
}

/// A convex combination of forests. Edge ids are indices into
/// [`SimpleGraph::edges`] for graphs and constraint ids for instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestDistribution {
    pub marginals: BTreeMap<usize, f64>,
    pub parts: Vec<ForestPart>,
}

impl ForestDistribution {
    fn from_parts(parts: Vec<ForestPart>, ids: impl IntoIterator<Item = usize>) -> Self {
        let mut marginals: BTreeMap<usize, f64> = ids.into_iter().map(|id| (id, 0.0)).collect();
        for p in &parts {
            for id in &p.edges {
                *marginals.get_mut(id).expect("forest edge is known") += p.weight;
            }
        }
        ForestDistribution { marginals, parts }
    }

    /// Checks weights, acyclicity and `marginal = 2/(d+1) ± 1e-9` against a graph.
    pub fn verify_graph(&self, g: &SimpleGraph, d: usize) -> Result<()> {
        let pairs: Vec<(usize, usize)> = g.edges();
        self.verify_with(d, pairs.len(), |id| pairs.get(id).copied())
    }

    /// As [`verify_graph`](Self::verify_graph), with parallel constraints
    /// treated as one link of the constraint graph.
    pub fn verify_instance(&self, inst: &CspInstance, d: usize) -> Result<()> {
        self.verify_with(d, inst.edge_count(), |id| inst.edge_by_id(id).map(|e| (e.u, e.v)))
    }

    fn verify_with(&self, d: usize, edges: usize, ends: impl Fn(usize) -> Option<(usize, usize)>) -> Result<()> {
        let total: f64 = self.parts.iter().map(|p| p.weight).sum();
        if (total - 1.0).abs() > 1e-12 || self.parts.iter().any(|p| p.weight < 0.0) {
            return Err(Error::Internal {
                message: format!("forest weights sum to {total}"),
                residual: vec![total - 1.0],
            });
        }
        if self.parts.len() > edges + 1 {
            return Err(Error::Internal {
                message: format!("support {} exceeds |E| + 1 = {}", self.parts.len(), edges + 1),
                residual: vec![],
            });
        }
        for p in &self.parts {
            let mut links = BTreeSet::new();
            for &id in &p.edges {
                let (u, v) = ends(id).ok_or_else(|| Error::Validation(format!("unknown edge id {id}")))?;
                links.insert((u.min(v), u.max(v)));
            }
            if !acyclic(&links) {
                return Err(Error::Internal {
                    message: "a part of the distribution contains a cycle".into(),
                    residual: vec![],
                });
            }
        }
        let target = 2.0 / (d + 1) as f64;
        let residual: Vec<f64> = self.marginals.values().map(|m| m - target).collect();
        if self.marginals.len() != edges || residual.iter().any(|r| r.abs() > 1e-9) {
            return Err(Error::Internal {
                message: format!("marginals differ from {target}"),
                residual,
            });
        }
        Ok(())
    }
}

fn acyclic(links: &BTreeSet<(usize, usize)>) -> bool {
    let mut root: BTreeMap<usize, usize> = BTreeMap::new();
    fn find(root: &mut BTreeMap<usize, usize>, x: usize) -> usize {
        let mut y = x;
        while let Some(&p) = root.get(&y) {
            if p == y {
                break;
            }
            y = p;
        }
        root.insert(x, y);
        y
    }
    for &(u, v) in links {
        root.entry(u).or_insert(u);
        root.entry(v).or_insert(v);
        let (a, b) = (find(&mut root, u), find(&mut root, v));
        if a == b {
            return false;
        }
        root.insert(a, b);
    }
    true
}

/// Exact decomposition of `x_e = 2/(d+1)` on the edges of `g` into at most
/// `|E| + 1` forests.
pub fn forest_decomposition(g: &SimpleGraph, d: usize) -> Result<ForestDistribution> {
    if let Some(v) = (0..g.num_vertices()).find(|&v| g.degree(v) > d) {
        return Err(Error::Precondition(format!("vertex {v} has degree {} > {d}", g.degree(v))));
    }
    let links = g.edges();
    let parts = decompose::decompose_links(g.num_vertices(), &links, d)?
        .into_iter()
        .map(|(weight, set)| ForestPart {
            edges: set.into_iter().collect(),
            weight,
        })
        .collect();
    Ok(ForestDistribution::from_parts(parts, 0..links.len()))
}

/// Forest decomposition of a constraint graph; parallel constraints travel
/// together and share their link's marginal.
pub fn instance_forest_decomposition(inst: &CspInstance, d: usize) -> Result<ForestDistribution> {
    let max = inst.max_degree();
    if max > d {
        return Err(Error::Precondition(format!("constraint graph has degree {max} > {d}")));
    }
    let mut grouped: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for e in inst.edges() {
        grouped.entry((e.u.min(e.v), e.u.max(e.v))).or_default().push(e.id);
    }
    let links: Vec<(usize, usize)> = grouped.keys().copied().collect();
    let ids: Vec<&Vec<usize>> = grouped.values().collect();
    let parts = decompose::decompose_links(inst.num_vertices(), &links, d)?
        .into_iter()
        .map(|(weight, set)| ForestPart {
            edges: set.into_iter().flat_map(|l| ids[l].iter().copied()).collect(),
            weight,
        })
        .collect();
    Ok(ForestDistribution::from_parts(parts, inst.edges().iter().map(|e| e.id)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxResult {
    pub assignment: Assignment,
    /// Index of the part whose assignment was kept.
    pub best_part: usize,
    pub certificate: ForestDistribution,
    /// Satisfied count of each part's assignment on the whole instance.
    pub part_satisfied: Vec<usize>,
    pub satisfied: usize,
    pub value: f64,
    /// `Σ weight · (forest-optimal count)`, at least `2/(d+1) · OPT`.
    pub weighted_forest_count: f64,
}

/// Solves every forest of the decomposition exactly and keeps the assignment
/// that satisfies the most constraints of the whole instance (ties: first part).
pub fn approx_solve(inst: &CspInstance, d: usize) -> Result<ApproxResult> {
    if inst.edge_count() == 0 {
        return Err(Error::Degenerate("instance has no edges".into()));
    }
    let certificate = instance_forest_decomposition(inst, d)?;
    let solved: Vec<(TreeDpResult, usize)> = certificate
        .parts
        .par_iter()
        .map(|p| {
            let dp = tree_dp(inst, &p.edges)?;
            let full = inst.satisfied_count(&dp.assignment)?;
            Ok((dp, full))
        })
        .collect::<Result<_>>()?;
    let weighted_forest_count = certificate
        .parts
        .iter()
        .zip(&solved)
        .map(|(p, (dp, _))| p.weight * dp.satisfied as f64)
        .sum();
    let mut best_part = 0;
    for (i, (_, full)) in solved.iter().enumerate() {
        if *full > solved[best_part].1 {
            best_part = i;
        }
    }
    let part_satisfied = solved.iter().map(|(_, full)| *full).collect();
    let (dp, satisfied) = solved.into_iter().nth(best_part).expect("support is nonempty");
    Ok(ApproxResult {
        value: satisfied as f64 / inst.edge_count() as f64,
        assignment: dp.assignment,
        best_part,
        certificate,
        part_satisfied,
        satisfied,
        weighted_forest_count,
    })
}
