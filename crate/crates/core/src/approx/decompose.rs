//! Exact convex decomposition of `x_e = 2/(d+1)` into forests.
//!
//! The doubled multigraph (every link twice) is partitioned into `d+1` forests
//! with matroid-partition augmenting paths; feasibility of `x` in the forest
//! polytope is exactly the Nash-Williams condition for such a partition. The
//! two copies of a link cannot share a forest, so each link lies in exactly two
//! of them and the uniform mixture has marginal `2/(d+1)` on every link.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// `d+1` forests over copies of the links, grown by shortest augmenting paths.
struct Partition {
    ends: Vec<(usize, usize)>,
    owner: Vec<Option<usize>>,
    // adj[forest][vertex] = (neighbor, element)
    adj: Vec<Vec<Vec<(usize, usize)>>>,
}

impl Partition {
    fn new(n: usize, links: &[(usize, usize)], forests: usize) -> Self {
        let ends = links.iter().flat_map(|&l| [l, l]).collect::<Vec<_>>();
        Partition {
            owner: vec![None; ends.len()],
            ends,
            adj: vec![vec![Vec::new(); n]; forests],
        }
    }

    /// Elements on the forest path between `a` and `b`, or `None` if disconnected.
    fn path(&self, f: usize, a: usize, b: usize) -> Option<Vec<usize>> {
        let adj = &self.adj[f];
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; adj.len()];
        let mut seen = vec![false; adj.len()];
        seen[a] = true;
        let mut queue = VecDeque::from([a]);
        while let Some(x) = queue.pop_front() {
            if x == b {
                let mut out = Vec::new();
                let mut y = b;
                while let Some((p, e)) = prev[y] {
                    out.push(e);
                    y = p;
                }
                return Some(out);
            }
            for &(w, e) in &adj[x] {
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some((x, e));
                    queue.push_back(w);
                }
            }
        }
        None
    }

    fn attach(&mut self, e: usize, f: usize) {
        let (u, v) = self.ends[e];
        self.adj[f][u].push((v, e));
        self.adj[f][v].push((u, e));
        self.owner[e] = Some(f);
    }

    fn detach(&mut self, e: usize) {
        if let Some(f) = self.owner[e].take() {
            let (u, v) = self.ends[e];
            self.adj[f][u].retain(|&(_, x)| x != e);
            self.adj[f][v].retain(|&(_, x)| x != e);
        }
    }

    fn insert(&mut self, x: usize) -> bool {
        let forests = self.adj.len();
        let mut parent: Vec<Option<usize>> = vec![None; self.ends.len()];
        let mut seen = vec![false; self.ends.len()];
        seen[x] = true;
        let mut queue = VecDeque::from([x]);
        while let Some(y) = queue.pop_front() {
            let (u, v) = self.ends[y];
            for f in 0..forests {
                if self.owner[y] == Some(f) {
                    continue;
                }
                match self.path(f, u, v) {
                    None => {
                        self.augment(y, f, &parent);
                        return true;
                    }
                    Some(cycle) => {
                        for z in cycle {
                            if !seen[z] {
                                seen[z] = true;
                                parent[z] = Some(y);
                                queue.push_back(z);
                            }
                        }
                    }
                }
            }
        }
        false
    }

    fn augment(&mut self, mut y: usize, mut f: usize, parent: &[Option<usize>]) {
        loop {
            let vacated = self.owner[y];
            self.detach(y);
            self.attach(y, f);
            match parent[y] {
                Some(p) => {
                    f = vacated.expect("displaced element had a forest");
                    y = p;
                }
                None => break,
            }
        }
    }
}

/// Decomposes `x = 2/(d+1)` on `links` (pairs over `n` vertices, no parallel
/// pairs) into weighted forests given as sorted link indices.
pub(crate) fn decompose_links(n: usize, links: &[(usize, usize)], d: usize) -> Result<Vec<(f64, Vec<usize>)>> {
    let forests = d + 1;
    let mut part = Partition::new(n, links, forests);
    for x in 0..part.ends.len() {
        if !part.insert(x) {
            let mut placed = vec![0usize; links.len()];
            for (e, o) in part.owner.iter().enumerate() {
                if o.is_some() {
                    placed[e / 2] += 1;
                }
            }
            let residual = placed.iter().map(|&c| (2.0 - c as f64) / forests as f64).collect();
            return Err(Error::Internal {
                message: format!("no partition of the doubled graph into {forests} forests"),
                residual,
            });
        }
    }
    let mut parts: Vec<(f64, Vec<usize>)> = Vec::new();
    for f in 0..forests {
        let mut set: Vec<usize> = (0..part.ends.len())
            .filter(|&e| part.owner[e] == Some(f))
            .map(|e| e / 2)
            .collect();
        set.sort_unstable();
        let w = 1.0 / forests as f64;
        match parts.iter_mut().find(|(_, s)| *s == set) {
            Some(existing) => existing.0 += w,
            None => parts.push((w, set)),
        }
    }
    if parts.len() > links.len() + 1 {
        caratheodory(&mut parts, links.len());
    }
    Ok(parts)
}

/// Shrinks the support to at most `edges + 1` parts without changing marginals
/// or the total weight.
fn caratheodory(parts: &mut Vec<(f64, Vec<usize>)>, edges: usize) {
    const TOL: f64 = 1e-12;
    while parts.len() > edges + 1 {
        let k = parts.len();
        // columns: (indicator of the forest, 1)
        let mut m = vec![vec![0.0; k]; edges + 1];
        for (j, (_, set)) in parts.iter().enumerate() {
            for &e in set {
                m[e][j] = 1.0;
            }
            m[edges][j] = 1.0;
        }
        let z = null_vector(&mut m, k, TOL);
        let step = parts
            .iter()
            .zip(&z)
            .filter(|(_, &zj)| zj > TOL)
            .map(|((w, _), &zj)| w / zj)
            .fold(f64::INFINITY, f64::min);
        let mut drop = None;
        for (j, (w, _)) in parts.iter_mut().enumerate() {
            *w -= step * z[j];
            if z[j] > TOL && (*w).abs() <= TOL * 10.0 && drop.is_none() {
                drop = Some(j);
            }
        }
        let j = drop.unwrap_or_else(|| {
            (0..k)
                .min_by(|&a, &b| parts[a].0.partial_cmp(&parts[b].0).unwrap())
                .unwrap()
        });
        parts.remove(j);
        parts.retain(|(w, _)| *w > TOL);
        let total: f64 = parts.iter().map(|p| p.0).sum();
        for p in parts.iter_mut() {
            p.0 /= total;
        }
    }
}

/// A nonzero `z` with `m z = 0`; requires more columns than rows.
fn null_vector(m: &mut [Vec<f64>], cols: usize, tol: f64) -> Vec<f64> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows).max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap()).unwrap();
        if m[best][c].abs() <= tol {
            continue;
        }
        m.swap(r, best);
        let pv = m[r][c];
        for x in m[r].iter_mut() {
            *x /= pv;
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0.0 {
                let f = m[i][c];
                let (src, dst) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (x, y) in dst.iter_mut().zip(src.iter()) {
                    *x -= f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free = (0..cols).find(|c| !pivots.contains(c)).expect("more columns than rank");
    let mut z = vec![0.0; cols];
    z[free] = 1.0;
    for (row, &pc) in pivots.iter().enumerate() {
        z[pc] = -m[row][free];
    }
    z
}
