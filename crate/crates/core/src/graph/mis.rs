use serde::{Deserialize, Serialize};

use super::SimpleGraph;
use crate::error::{Error, Result};

pub const DEFAULT_EXACT_CAP: usize = 40;
const HARD_CAP: usize = 128;

/// Limits for the exact solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Largest vertex count handed to branch and bound (at most 128).
    pub cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { cap: DEFAULT_EXACT_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependentSet {
    pub size: usize,
    /// Lexicographically smallest maximum independent set.
    pub vertices: Vec<usize>,
}

/// `indep(G)` with a witness, by branch and bound.
pub fn indep_exact(g: &SimpleGraph, config: &SolverConfig) -> Result<IndependentSet> {
    let n = g.num_vertices();
    let cap = config.cap.min(HARD_CAP);
    if n > cap {
        return Err(Error::SizeLimit {
            what: "graph for exact independent set".into(),
            size: n as u128,
            cap: cap as u128,
        });
    }
    let all: Vec<usize> = (0..n).collect();
    let local = Induced::new(g, &all);
    let size = local.alpha(local.full());
    let vertices = local
        .lex_min_independent(size)
        .expect("a set of size alpha exists");
    Ok(IndependentSet { size, vertices })
}

/// Induced subgraph on a sorted vertex list, as bitmasks.
pub(super) struct Induced {
    ids: Vec<usize>,
    adj: Vec<u128>,
}

#[inline]
fn bit(i: usize) -> u128 {
    1u128 << i
}

impl Induced {
    pub(super) fn new(g: &SimpleGraph, ids: &[usize]) -> Self {
        assert!(ids.len() <= HARD_CAP);
        let adj = ids
            .iter()
            .map(|&u| {
                ids.iter()
                    .enumerate()
                    .filter(|&(_, &v)| g.has_edge(u, v))
                    .fold(0u128, |m, (j, _)| m | bit(j))
            })
            .collect();
        Induced { ids: ids.to_vec(), adj }
    }

    fn full(&self) -> u128 {
        if self.ids.len() == HARD_CAP {
            u128::MAX
        } else {
            bit(self.ids.len()) - 1
        }
    }

    /// Maximum independent set size inside `cand`.
    fn alpha(&self, cand: u128) -> usize {
        let mut best = self.greedy(cand);
        self.branch(cand, 0, &mut best);
        best
    }

    /// Lexicographically smallest independent set of size `k` (in original ids).
    pub(super) fn lex_min_independent(&self, k: usize) -> Option<Vec<usize>> {
        let mut avail = self.full();
        if self.alpha(avail) < k {
            return None;
        }
        let mut chosen = Vec::with_capacity(k);
        let mut need = k;
        for i in 0..self.ids.len() {
            if need == 0 {
                break;
            }
            if avail & bit(i) == 0 {
                continue;
            }
            let rest = avail & !self.adj[i] & !bit(i);
            if 1 + self.alpha(rest) >= need {
                chosen.push(self.ids[i]);
                need -= 1;
                avail = rest;
            } else {
                avail &= !bit(i);
            }
        }
        debug_assert_eq!(need, 0);
        Some(chosen)
    }

    fn greedy(&self, mut cand: u128) -> usize {
        let mut size = 0;
        while cand != 0 {
            let v = iter_bits(cand)
                .min_by_key(|&v| (self.adj[v] & cand).count_ones())
                .unwrap();
            size += 1;
            cand &= !(self.adj[v] | bit(v));
        }
        size
    }

    fn branch(&self, mut cand: u128, mut size: usize, best: &mut usize) {
        // Vertices of degree ≤ 1 belong to some maximum independent set.
        loop {
            let low = iter_bits(cand).find(|&v| (self.adj[v] & cand).count_ones() <= 1);
            match low {
                Some(v) => {
                    size += 1;
                    cand &= !(self.adj[v] | bit(v));
                }
                None => break,
            }
        }
        if cand == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + self.clique_cover(cand) <= *best {
            return;
        }
        let v = iter_bits(cand)
            .max_by_key(|&v| ((self.adj[v] & cand).count_ones(), std::cmp::Reverse(v)))
            .unwrap();
        self.branch(cand & !(self.adj[v] | bit(v)), size + 1, best);
        self.branch(cand & !bit(v), size, best);
    }

    /// Number of cliques in a greedy clique cover of `cand`; bounds alpha from above.
    fn clique_cover(&self, cand: u128) -> usize {
        let mut commons: Vec<u128> = Vec::new();
        for v in iter_bits(cand) {
            match commons.iter_mut().find(|c| **c & bit(v) != 0) {
                Some(c) => *c &= self.adj[v],
                None => commons.push(self.adj[v] & cand),
            }
        }
        commons.len()
    }
}

fn iter_bits(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rng;
    use proptest::prelude::*;
    use rand::Rng;

    /// Exhaustive oracle: best subset by (size desc, lexicographic asc).
    fn brute_alpha(g: &SimpleGraph) -> (usize, Vec<usize>) {
        let n = g.num_vertices();
        let mut best: (usize, Vec<usize>) = (0, vec![]);
        for mask in 0u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if g.is_independent(&set) && (set.len() > best.0 || (set.len() == best.0 && set < best.1)) {
                best = (set.len(), set);
            }
        }
        best
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> SimpleGraph {
        let mut r = rng(seed);
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|_| r.random::<f64>() < p)
            .collect();
        SimpleGraph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn trivial_graphs() {
        let cfg = SolverConfig::default();
        assert_eq!(indep_exact(&SimpleGraph::empty(5), &cfg).unwrap().size, 5);
        let k4 = indep_exact(&SimpleGraph::complete(4), &cfg).unwrap();
        assert_eq!((k4.size, k4.vertices), (1, vec![0]));
        assert_eq!(indep_exact(&SimpleGraph::empty(0), &cfg).unwrap().size, 0);
        let c7 = indep_exact(&SimpleGraph::cycle(7).unwrap(), &cfg).unwrap();
        assert_eq!((c7.size, c7.vertices), (3, vec![0, 2, 4]));
    }

    #[test]
    fn cap_enforced() {
        let cfg = SolverConfig { cap: 4 };
        assert!(matches!(
            indep_exact(&SimpleGraph::empty(5), &cfg),
            Err(Error::SizeLimit { size: 5, cap: 4, .. })
        ));
    }

    #[test]
    fn matches_exhaustive_search() {
        for seed in 0..200 {
            let n = 1 + (seed as usize % 13);
            let g = random_graph(n, 0.15 + 0.05 * (seed % 12) as f64, seed);
            let got = indep_exact(&g, &SolverConfig::default()).unwrap();
            assert!(g.is_independent(&got.vertices));
            assert_eq!((got.size, got.vertices), brute_alpha(&g), "seed {seed}");
        }
    }

    #[test]
    fn handles_forty_vertices() {
        let g = random_graph(40, 0.2, 77);
        let got = indep_exact(&g, &SolverConfig::default()).unwrap();
        assert!(g.is_independent(&got.vertices));
        assert_eq!(got.vertices.len(), got.size);
    }

    proptest! {
        #[test]
        fn adding_an_edge_never_increases_alpha(seed in 0u64..10_000, n in 2usize..12) {
            let g = random_graph(n, 0.3, seed);
            let mut r = rng(seed ^ 0xabc);
            let u = r.random_range(0..n);
            let v = (u + r.random_range(1..n)) % n;
            let mut edges = g.edges();
            edges.push((u, v));
            let h = SimpleGraph::from_edges(n, edges).unwrap();
            let cfg = SolverConfig::default();
            prop_assert!(indep_exact(&h, &cfg).unwrap().size <= indep_exact(&g, &cfg).unwrap().size);
            prop_assert_eq!(indep_exact(&h, &cfg).unwrap().size, brute_alpha(&h).0);
        }
    }
}
