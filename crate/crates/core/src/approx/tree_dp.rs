use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::csp::{Assignment, CspInstance, Label};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDpResult {
    pub assignment: Assignment,
    pub satisfied: usize,
    /// `table[v][σ]`: best number of satisfied forest constraints in the
    /// subtree below `v` when `v` carries `σ`.
    pub table: Vec<Vec<usize>>,
}

/// Union-find cycle check on the vertex pairs of `ids`; parallel constraints
/// on one pair count as a single link.
pub(crate) fn links_of(inst: &CspInstance, ids: &BTreeSet<usize>) -> Result<BTreeMap<(usize, usize), Vec<usize>>> {
    let mut links: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for &id in ids {
        let e = inst
            .edge_by_id(id)
            .ok_or_else(|| Error::Validation(format!("unknown edge id {id}")))?;
        links.entry((e.u.min(e.v), e.u.max(e.v))).or_default().push(id);
    }
    let mut root: Vec<usize> = (0..inst.num_vertices()).collect();
    fn find(root: &mut [usize], mut x: usize) -> usize {
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    for &(u, v) in links.keys() {
        let (a, b) = (find(&mut root, u), find(&mut root, v));
        if a == b {
            return Err(Error::Precondition(format!("edge set has a cycle through ({u}, {v})")));
        }
        root[a] = b;
    }
    Ok(links)
}

/// Optimal assignment for the constraints in `forest`.
///
/// Each component is rooted at its smallest vertex; ties go to the smallest
/// label, and vertices outside the forest get label 0.
pub fn tree_dp(inst: &CspInstance, forest: &BTreeSet<usize>) -> Result<TreeDpResult> {
    let links = links_of(inst, forest)?;
    let n = inst.num_vertices();
    // per vertex: (neighbor, constraint ids)
    let mut adj: Vec<Vec<(usize, &[usize])>> = vec![Vec::new(); n];
    for (&(u, v), ids) in &links {
        adj[u].push((v, ids));
        adj[v].push((u, ids));
    }
    // weight of (label at x, label at y) across the constraints of one link
    let weight = |ids: &[usize], x: usize, lx: Label, ly: Label| -> usize {
        ids.iter()
            .filter(|&&id| inst.edge_by_id(id).unwrap().accepts_at(x, lx, ly))
            .count()
    };

    let mut table: Vec<Vec<usize>> = (0..n).map(|v| vec![0; inst.alphabet(v)]).collect();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n]; // (parent, index into adj[parent])
    let mut visited = vec![false; n];
    let mut labels = vec![0; n];
    let mut satisfied = 0;
    for r in 0..n {
        if visited[r] {
            continue;
        }
        let mut order = vec![r];
        visited[r] = true;
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for (k, &(y, _)) in adj[x].iter().enumerate() {
                if !visited[y] {
                    visited[y] = true;
                    parent[y] = Some((x, k));
                    order.push(y);
                }
            }
            i += 1;
        }
        for &y in order.iter().rev() {
            if let Some((x, k)) = parent[y] {
                let ids = adj[x][k].1;
                for lx in 0..inst.alphabet(x) {
                    let best = (0..inst.alphabet(y))
                        .map(|ly| weight(ids, x, lx, ly) + table[y][ly])
                        .max()
                        .unwrap_or(0);
                    table[x][lx] += best;
                }
            }
        }
        let (best_root, value) = argmax(&table[r]);
        labels[r] = best_root;
        satisfied += value;
        for &y in &order[1..] {
            let (x, k) = parent[y].unwrap();
            let ids = adj[x][k].1;
            let lx = labels[x];
            let scores: Vec<usize> = (0..inst.alphabet(y))
                .map(|ly| weight(ids, x, lx, ly) + table[y][ly])
                .collect();
            labels[y] = argmax(&scores).0;
        }
    }
    Ok(TreeDpResult {
        assignment: Assignment(labels),
        satisfied,
        table,
    })
}

/// First index of the maximum; `(0, 0)` for an empty slice.
fn argmax(xs: &[usize]) -> (usize, usize) {
    xs.iter()
        .enumerate()
        .fold((0, 0), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
}
