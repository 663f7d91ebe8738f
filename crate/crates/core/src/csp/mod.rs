//! Binary constraint satisfaction instances.
//!
//! A [`CspInstance`] is a constraint (multi)graph on vertices `0..n`, an
//! alphabet size per vertex (labels of vertex `v` are `0..alphabet(v)`), and
//! one explicit relation per edge. Edges carry unique integer ids so that
//! parallel constraints between the same pair of vertices stay distinguishable.
//! An optional bipartition orients every edge from its left endpoint to its
//! right endpoint.

mod generate;
mod json;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::{gen_planted, gen_random, gen_random_bipartite, PlantedInstance, PlantedSpec, RandomSpec};

pub type Vertex = usize;
pub type Label = usize;

/// A single binary constraint `R_e ⊆ Σ_u × Σ_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub id: usize,
    pub u: Vertex,
    pub v: Vertex,
    pub allowed: BTreeSet<(Label, Label)>,
}

impl Constraint {
    pub fn new(id: usize, u: Vertex, v: Vertex, allowed: impl IntoIterator<Item = (Label, Label)>) -> Self {
        Constraint {
            id,
            u,
            v,
            allowed: allowed.into_iter().collect(),
        }
    }

    /// Whether the pair `(label of u, label of v)` satisfies this constraint.
    #[inline]
    pub fn accepts(&self, label_u: Label, label_v: Label) -> bool {
        self.allowed.contains(&(label_u, label_v))
    }

    /// Same check with the endpoints given in either orientation.
    pub fn accepts_at(&self, a: Vertex, label_a: Label, label_b: Label) -> bool {
        if a == self.u {
            self.accepts(label_a, label_b)
        } else {
            self.accepts(label_b, label_a)
        }
    }

    pub fn other(&self, w: Vertex) -> Vertex {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Left/right vertex classes of a bipartite instance, both sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    #[serde(rename = "A")]
    pub left: Vec<Vertex>,
    #[serde(rename = "B")]
    pub right: Vec<Vertex>,
}

impl Bipartition {
    pub fn new(mut left: Vec<Vertex>, mut right: Vec<Vertex>) -> Self {
        left.sort_unstable();
        right.sort_unstable();
        Bipartition { left, right }
    }
}

/// A validated 2-CSP instance. Edges are kept sorted by id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspInstance {
    alphabets: Vec<usize>,
    edges: Vec<Constraint>,
    bipartition: Option<Bipartition>,
}

impl CspInstance {
    pub fn new(alphabets: Vec<usize>, mut edges: Vec<Constraint>, bipartition: Option<Bipartition>) -> Result<Self> {
        let n = alphabets.len();
        if let Some(v) = alphabets.iter().position(|&s| s == 0) {
            return Err(Error::Validation(format!("alphabets[{v}]: alphabet size must be positive")));
        }
        edges.sort_by_key(|e| e.id);
        for w in edges.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::Validation(format!("duplicate edge id {}", w[0].id)));
            }
        }
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(Error::Validation(format!(
                    "edge {}: endpoint out of range ({}, {}) for {} vertices",
                    e.id, e.u, e.v, n
                )));
            }
            if e.u == e.v {
                return Err(Error::Validation(format!("edge {}: self-loop on vertex {}", e.id, e.u)));
            }
            let (su, sv) = (alphabets[e.u], alphabets[e.v]);
            if let Some(&(a, b)) = e.allowed.iter().find(|&&(a, b)| a >= su || b >= sv) {
                return Err(Error::Validation(format!(
                    "edge {}: allowed pair ({a}, {b}) outside alphabets [{su}] x [{sv}]",
                    e.id
                )));
            }
        }
        let bipartition = match bipartition {
            Some(bp) => {
                let bp = Bipartition::new(bp.left, bp.right);
                let mut side = vec![None; n];
                for (list, tag) in [(&bp.left, 0u8), (&bp.right, 1u8)] {
                    for &x in list {
                        if x >= n {
                            return Err(Error::Validation(format!("bipartition: vertex {x} out of range")));
                        }
                        if side[x].is_some() {
                            return Err(Error::Validation(format!("bipartition: vertex {x} listed twice")));
                        }
                        side[x] = Some(tag);
                    }
                }
                if let Some(x) = side.iter().position(Option::is_none) {
                    return Err(Error::Validation(format!("bipartition: vertex {x} is on neither side")));
                }
                for e in &edges {
                    if side[e.u] != Some(0) || side[e.v] != Some(1) {
                        return Err(Error::Validation(format!(
                            "edge {}: must run from side A to side B, got ({}, {})",
                            e.id, e.u, e.v
                        )));
                    }
                }
                Some(bp)
            }
            None => None,
        };
        Ok(CspInstance {
            alphabets,
            edges,
            bipartition,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.alphabets.len()
    }

    pub fn alphabets(&self) -> &[usize] {
        &self.alphabets
    }

    pub fn alphabet(&self, v: Vertex) -> usize {
        self.alphabets[v]
    }

    pub fn edges(&self) -> &[Constraint] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn bipartition(&self) -> Option<&Bipartition> {
        self.bipartition.as_ref()
    }

    pub fn edge_by_id(&self, id: usize) -> Option<&Constraint> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| &self.edges[i])
    }

    /// Degree of every vertex, counting parallel edges separately.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_vertices()];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Incident edge indices (positions in [`Self::edges`]) per vertex.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.num_vertices()];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.u].push(i);
            inc[e.v].push(i);
        }
        inc
    }

    /// Number of edges satisfied by `psi`.
    pub fn satisfied_count(&self, psi: &Assignment) -> Result<usize> {
        psi.validate(self)?;
        Ok(self
            .edges
            .iter()
            .filter(|e| e.accepts(psi.0[e.u], psi.0[e.v]))
            .count())
    }

    /// `val_Π(ψ)`: the fraction of satisfied edges.
    pub fn value(&self, psi: &Assignment) -> Result<f64> {
        if self.edges.is_empty() {
            return Err(Error::Degenerate("instance has no edges; value is undefined".into()));
        }
        Ok(self.satisfied_count(psi)? as f64 / self.edges.len() as f64)
    }

    /// Returns the same instance with the bipartition dropped.
    pub fn without_bipartition(&self) -> CspInstance {
        CspInstance {
            alphabets: self.alphabets.clone(),
            edges: self.edges.clone(),
            bipartition: None,
        }
    }

    /// Canonical compact JSON (sorted keys, edges by id, pairs lexicographic).
    pub fn to_json(&self) -> String {
        json::to_canonical(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        json::parse(text)
    }

    /// Hex SHA-256 of the canonical JSON.
    pub fn content_hash(&self) -> String {
        crate::util::sha256_hex(self.to_json().as_bytes())
    }
}

impl Serialize for CspInstance {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        json::InstanceDoc::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CspInstance {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = json::InstanceDoc::deserialize(deserializer)?;
        doc.into_instance().map_err(serde::de::Error::custom)
    }
}

/// A total labeling `ψ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(pub Vec<Label>);

impl Assignment {
    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn validate(&self, inst: &CspInstance) -> Result<()> {
        if self.0.len() != inst.num_vertices() {
            return Err(Error::Validation(format!(
                "assignment has {} labels, instance has {} vertices",
                self.0.len(),
                inst.num_vertices()
            )));
        }
        if let Some(v) = (0..self.0.len()).find(|&v| self.0[v] >= inst.alphabet(v)) {
            return Err(Error::Validation(format!(
                "label {} of vertex {v} outside alphabet of size {}",
                self.0[v],
                inst.alphabet(v)
            )));
        }
        Ok(())
    }
}

/// A labeling in which some vertices may be unset (`None`, written ⊥).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartialAssignment(pub Vec<Option<Label>>);

impl PartialAssignment {
    /// Number of set vertices.
    pub fn size(&self) -> usize {
        self.0.iter().filter(|l| l.is_some()).count()
    }

    pub fn validate(&self, inst: &CspInstance) -> Result<()> {
        if self.0.len() != inst.num_vertices() {
            return Err(Error::Validation(format!(
                "partial assignment has {} entries, instance has {} vertices",
                self.0.len(),
                inst.num_vertices()
            )));
        }
        for (v, l) in self.0.iter().enumerate() {
            if let Some(l) = *l {
                if l >= inst.alphabet(v) {
                    return Err(Error::Validation(format!(
                        "label {l} of vertex {v} outside alphabet of size {}",
                        inst.alphabet(v)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Every edge with both endpoints set is satisfied.
    pub fn is_consistent(&self, inst: &CspInstance) -> Result<bool> {
        self.validate(inst)?;
        Ok(inst.edges().iter().all(|e| match (self.0[e.u], self.0[e.v]) {
            (Some(a), Some(b)) => e.accepts(a, b),
            _ => true,
        }))
    }
}

/// Degree condition checked by [`validate_degrees`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMode {
    Bounded(usize),
    BoundedBipartite { left: usize, right: usize },
    Biregular { left: usize, right: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub max_degree: usize,
    pub degrees: Vec<usize>,
    /// Degrees of the left vertices in sorted vertex order, when bipartite.
    pub left_degrees: Option<Vec<usize>>,
    pub right_degrees: Option<Vec<usize>>,
}

impl DegreeProfile {
    pub fn of(inst: &CspInstance) -> Self {
        let degrees = inst.degrees();
        let (left_degrees, right_degrees) = match inst.bipartition() {
            Some(bp) => (
                Some(bp.left.iter().map(|&a| degrees[a]).collect()),
                Some(bp.right.iter().map(|&b| degrees[b]).collect()),
            ),
            None => (None, None),
        };
        DegreeProfile {
            max_degree: degrees.iter().copied().max().unwrap_or(0),
            degrees,
            left_degrees,
            right_degrees,
        }
    }
}

/// Checks a degree condition exactly. Bipartite modes fail on instances without a bipartition.
pub fn validate_degrees(inst: &CspInstance, mode: DegreeMode) -> (bool, DegreeProfile) {
    let profile = DegreeProfile::of(inst);
    let ok = match mode {
        DegreeMode::Bounded(d) => profile.max_degree <= d,
        DegreeMode::BoundedBipartite { left, right } => match (&profile.left_degrees, &profile.right_degrees) {
            (Some(l), Some(r)) => l.iter().all(|&x| x <= left) && r.iter().all(|&x| x <= right),
            _ => false,
        },
        DegreeMode::Biregular { left, right } => match (&profile.left_degrees, &profile.right_degrees) {
            (Some(l), Some(r)) => l.iter().all(|&x| x == left) && r.iter().all(|&x| x == right),
            _ => false,
        },
    };
    (ok, profile)
}

/// Degrees `(d₁, d₂)` if the instance is bipartite and biregular.
pub fn biregular_degrees(inst: &CspInstance) -> Option<(usize, usize)> {
    let profile = DegreeProfile::of(inst);
    let left = profile.left_degrees?;
    let right = profile.right_degrees?;
    let d1 = left.first().copied().unwrap_or(0);
    let d2 = right.first().copied().unwrap_or(0);
    (left.iter().all(|&x| x == d1) && right.iter().all(|&x| x == d2)).then_some((d1, d2))
}
