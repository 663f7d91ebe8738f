//! Simple undirected graphs: exact maximum independent set, induced claw
//! detection, and the second eigenvalue of regular graphs.

mod mis;
mod spectral;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use mis::{indep_exact, IndependentSet, SolverConfig, DEFAULT_EXACT_CAP};
pub use spectral::{second_eigenvalue, second_largest_eigenvalue, spectrum_orthogonal_to_ones};

/// Undirected graph without loops or parallel edges; neighbor lists are sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        SimpleGraph { adj: vec![Vec::new(); n] }
    }

    /// Builds a graph; duplicate edges collapse, self-loops and out-of-range endpoints are errors.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Validation(format!("edge ({u}, {v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::Validation(format!("self-loop on vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(SimpleGraph { adj })
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n).map(|u| (0..n).filter(|&v| v != u).collect()).collect();
        SimpleGraph { adj }
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Parameter(format!("cycle needs at least 3 vertices, got {n}")));
        }
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    /// Common degree if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|l| l.len() == d).then_some(d)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }

    /// Proper 2-coloring (`false` = first class) if the graph is bipartite.
    pub fn two_coloring(&self) -> Option<Vec<bool>> {
        let n = self.num_vertices();
        let mut color: Vec<Option<bool>> = vec![None; n];
        for s in 0..n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                let cu = color[u].unwrap();
                for &v in &self.adj[u] {
                    match color[v] {
                        None => {
                            color[v] = Some(!cu);
                            stack.push(v);
                        }
                        Some(cv) if cv == cu => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(Option::unwrap).collect())
    }

    /// Pairwise non-adjacent and in range.
    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().all(|&v| v < self.num_vertices())
            && set
                .iter()
                .enumerate()
                .all(|(i, &u)| set[i + 1..].iter().all(|&v| u != v && !self.has_edge(u, v)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphDoc::from(self)).expect("graph serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDoc = serde_json::from_str(text)?;
        doc.try_into()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    edges: Vec<[usize; 2]>,
    n: usize,
}

impl From<&SimpleGraph> for GraphDoc {
    fn from(g: &SimpleGraph) -> Self {
        GraphDoc {
            edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            n: g.num_vertices(),
        }
    }
}

impl TryFrom<GraphDoc> for SimpleGraph {
    type Error = Error;

    fn try_from(doc: GraphDoc) -> Result<Self> {
        SimpleGraph::from_edges(doc.n, doc.edges.into_iter().map(|[u, v]| (u, v))).map_err(|e| match e {
            Error::Validation(m) => Error::Parse(m),
            other => other,
        })
    }
}

impl Serialize for SimpleGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphDoc::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SimpleGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        GraphDoc::deserialize(deserializer)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}

/// An induced `K_{1,k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClawWitness {
    pub center: usize,
    pub leaves: Vec<usize>,
}

impl ClawWitness {
    /// Center adjacent to every leaf, leaves distinct and pairwise non-adjacent.
    pub fn verify(&self, g: &SimpleGraph) -> bool {
        self.center < g.num_vertices()
            && self.leaves.iter().all(|&l| l < g.num_vertices() && g.has_edge(self.center, l))
            && g.is_independent(&self.leaves)
    }
}

/// Finds an induced `k`-claw, if any.
///
/// Centers are scanned in increasing order; the leaves are the
/// lexicographically smallest independent `k`-subset of the first center's
/// neighborhood that has one.
pub fn find_claw(g: &SimpleGraph, k: usize, config: &SolverConfig) -> Result<Option<ClawWitness>> {
    if k == 0 {
        return Err(Error::Parameter("claw size k must be at least 1".into()));
    }
    for center in 0..g.num_vertices() {
        let nbrs = g.neighbors(center);
        if nbrs.len() < k {
            continue;
        }
        if nbrs.len() > config.cap {
            return Err(Error::SizeLimit {
                what: format!("neighborhood of vertex {center}"),
                size: nbrs.len() as u128,
                cap: config.cap as u128,
            });
        }
        let local = mis::Induced::new(g, nbrs);
        if let Some(leaves) = local.lex_min_independent(k) {
            return Ok(Some(ClawWitness { center, leaves }));
        }
    }
    Ok(None)
}
