//! Seeded synthetic instance generators.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Assignment, Bipartition, Constraint, CspInstance};
use crate::error::{Error, Result};
use crate::util::{rng, Rng};

/// Parameters of a planted biregular bipartite instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedSpec {
    pub left: usize,
    pub right: usize,
    pub left_degree: usize,
    pub right_degree: usize,
    pub left_alphabet: usize,
    pub right_alphabet: usize,
    pub noise: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlantedInstance {
    pub instance: CspInstance,
    pub planted: Assignment,
}

/// Generates a `(d₁, d₂)`-biregular bipartite instance around a hidden assignment.
///
/// Left vertices are `0..left`, right vertices follow. Each edge keeps the
/// planted pair with probability `1 − noise`; every other pair is added
/// independently with probability `1 / max(left_alphabet, right_alphabet)`.
pub fn gen_planted(spec: &PlantedSpec) -> Result<PlantedInstance> {
    if spec.left * spec.left_degree != spec.right * spec.right_degree {
        return Err(Error::Parameter(format!(
            "infeasible degree sequence: {}·{} ≠ {}·{}",
            spec.left, spec.left_degree, spec.right, spec.right_degree
        )));
    }
    if !(0.0..=1.0).contains(&spec.noise) {
        return Err(Error::Parameter(format!("noise {} outside [0, 1]", spec.noise)));
    }
    if spec.left_alphabet == 0 || spec.right_alphabet == 0 {
        return Err(Error::Parameter("alphabet sizes must be positive".into()));
    }
    let mut rng = rng(spec.seed);
    let pairs = biregular_edges(spec.left, spec.right, spec.left_degree, spec.right_degree, &mut rng);

    let n = spec.left + spec.right;
    let alphabets: Vec<usize> = (0..n)
        .map(|v| if v < spec.left { spec.left_alphabet } else { spec.right_alphabet })
        .collect();
    let planted: Vec<usize> = alphabets.iter().map(|&s| rng.random_range(0..s)).collect();
    let extra = 1.0 / spec.left_alphabet.max(spec.right_alphabet) as f64;

    let edges = pairs
        .into_iter()
        .enumerate()
        .map(|(id, (a, b))| {
            let (sa, sb) = (alphabets[a], alphabets[b]);
            let mut allowed = BTreeSet::new();
            for x in 0..sa {
                for y in 0..sb {
                    let keep = if (x, y) == (planted[a], planted[b]) {
                        rng.random::<f64>() >= spec.noise
                    } else {
                        rng.random::<f64>() < extra
                    };
                    if keep {
                        allowed.insert((x, y));
                    }
                }
            }
            Constraint { id, u: a, v: b, allowed }
        })
        .collect();

    let bipartition = Bipartition::new((0..spec.left).collect(), (spec.left..n).collect());
    let instance = CspInstance::new(alphabets, edges, Some(bipartition))?;
    Ok(PlantedInstance {
        instance,
        planted: Assignment(planted),
    })
}

/// Random biregular bipartite edge list (right vertices offset by `left`).
///
/// Tries the configuration model for a simple graph first; if that keeps
/// producing parallel edges, falls back to a randomly relabeled circulant
/// layout, which is simple whenever `d₁ ≤ right`.
fn biregular_edges(left: usize, right: usize, d1: usize, d2: usize, rng: &mut Rng) -> Vec<(usize, usize)> {
    let stubs = left * d1;
    let mut right_stubs: Vec<usize> = (0..right).flat_map(|b| std::iter::repeat_n(b, d2)).collect();
    let mut last = Vec::new();
    for _ in 0..32 {
        right_stubs.shuffle(rng);
        let mut edges: Vec<(usize, usize)> = (0..stubs).map(|k| (k / d1, left + right_stubs[k])).collect();
        edges.sort_unstable();
        let simple = edges.windows(2).all(|w| w[0] != w[1]);
        if simple {
            return edges;
        }
        last = edges;
    }
    if d1 > right {
        return last;
    }
    let mut lperm: Vec<usize> = (0..left).collect();
    let mut rperm: Vec<usize> = (0..right).collect();
    lperm.shuffle(rng);
    rperm.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = (0..stubs)
        .map(|k| (lperm[k / d1], left + rperm[k % right]))
        .collect();
    edges.sort_unstable();
    edges
}

/// Parameters of a random bounded-degree instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub vertices: usize,
    pub max_degree: usize,
    /// Target edge count; fewer edges are produced if the degree cap blocks it.
    pub edges: usize,
    pub min_alphabet: usize,
    pub max_alphabet: usize,
    /// Probability that each label pair is allowed.
    pub density: f64,
    pub seed: u64,
}

/// Random simple `max_degree`-bounded instance without a bipartition.
pub fn gen_random(spec: &RandomSpec) -> Result<CspInstance> {
    check_random(spec)?;
    let mut rng = rng(spec.seed);
    let n = spec.vertices;
    let alphabets: Vec<usize> = (0..n)
        .map(|_| rng.random_range(spec.min_alphabet..=spec.max_alphabet))
        .collect();
    let mut candidates: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    candidates.shuffle(&mut rng);
    let pairs = pick_bounded(candidates, n, n, spec.max_degree, spec.max_degree, spec.edges);
    let edges = relations(pairs, &alphabets, spec.density, &mut rng);
    CspInstance::new(alphabets, edges, None)
}

/// Random simple bipartite instance with left degrees ≤ `left_degree` and right degrees ≤ `right_degree`.
/// Left vertices are `0..left`.
pub fn gen_random_bipartite(
    left: usize,
    right: usize,
    left_degree: usize,
    right_degree: usize,
    spec: &RandomSpec,
) -> Result<CspInstance> {
    let n = left + right;
    check_random(&RandomSpec { vertices: n, ..spec.clone() })?;
    let mut rng = rng(spec.seed);
    let alphabets: Vec<usize> = (0..n)
        .map(|_| rng.random_range(spec.min_alphabet..=spec.max_alphabet))
        .collect();
    let mut candidates: Vec<(usize, usize)> = (0..left).flat_map(|a| (left..n).map(move |b| (a, b))).collect();
    candidates.shuffle(&mut rng);
    let pairs = pick_bounded(candidates, n, left, left_degree, right_degree, spec.edges);
    let edges = relations(pairs, &alphabets, spec.density, &mut rng);
    let bp = Bipartition::new((0..left).collect(), (left..n).collect());
    CspInstance::new(alphabets, edges, Some(bp))
}

fn check_random(spec: &RandomSpec) -> Result<()> {
    if spec.min_alphabet == 0 || spec.min_alphabet > spec.max_alphabet {
        return Err(Error::Parameter(format!(
            "alphabet range [{}, {}] is empty or contains 0",
            spec.min_alphabet, spec.max_alphabet
        )));
    }
    if !(0.0..=1.0).contains(&spec.density) {
        return Err(Error::Parameter(format!("density {} outside [0, 1]", spec.density)));
    }
    Ok(())
}

// Vertices below `split` use `cap_low`, the rest `cap_high`.
fn pick_bounded(
    candidates: Vec<(usize, usize)>,
    n: usize,
    split: usize,
    cap_low: usize,
    cap_high: usize,
    target: usize,
) -> Vec<(usize, usize)> {
    let cap = |v: usize| if v < split { cap_low } else { cap_high };
    let mut deg = vec![0; n];
    let mut out = Vec::new();
    for (u, v) in candidates {
        if out.len() == target {
            break;
        }
        if deg[u] < cap(u) && deg[v] < cap(v) {
            deg[u] += 1;
            deg[v] += 1;
            out.push((u, v));
        }
    }
    out.sort_unstable();
    out
}

fn relations(pairs: Vec<(usize, usize)>, alphabets: &[usize], density: f64, rng: &mut Rng) -> Vec<Constraint> {
    pairs
        .into_iter()
        .enumerate()
        .map(|(id, (u, v))| {
            let allowed = (0..alphabets[u])
                .flat_map(|x| (0..alphabets[v]).map(move |y| (x, y)))
                .filter(|_| rng.random::<f64>() < density)
                .collect();
            Constraint { id, u, v, allowed }
        })
        .collect()
}
