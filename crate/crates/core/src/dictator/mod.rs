//! Expander-predicate dictatorship test: the predicate gadget, its CSP
//! instantiations, test execution, Efron–Stein decomposition, influences and
//! the Gaussian lower-orthant probability `Γ_σ`.

mod fourier;
mod gaussian;
mod regular;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::csp::{Bipartition, Constraint, CspInstance};
use crate::error::{Error, Result};
use crate::graph::{second_eigenvalue, SimpleGraph};
use crate::util::{derive_seed, rng};

pub use fourier::{efron_stein, influence, EfronStein, DEFAULT_TABLE_CAP};
pub use gaussian::gamma_rho;

pub const DEFAULT_C_ACCEPT: f64 = 2.5;
pub const DEFAULT_EXACT_ACCEPT_CAP: u128 = 10_000_000;

/// `P = {(i, j) : {i, j} ∈ E_H}` for a `t`-regular expander `H` on `[R]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredicateGadget {
    /// Candidate graphs drawn before acceptance.
    pub attempts: usize,
    pub graph: SimpleGraph,
    /// Ordered pairs, lexicographically sorted.
    pub pairs: Vec<(usize, usize)>,
    pub r: usize,
    /// Largest nontrivial eigenvalue magnitude of `H/t`.
    pub rho: f64,
    pub t: usize,
}

impl PredicateGadget {
    fn from_graph(graph: SimpleGraph, t: usize, rho: f64, attempts: usize) -> Self {
        let mut pairs: Vec<(usize, usize)> = graph.edges().into_iter().flat_map(|(u, v)| [(u, v), (v, u)]).collect();
        pairs.sort_unstable();
        PredicateGadget {
            attempts,
            r: graph.num_vertices(),
            graph,
            pairs,
            rho,
            t,
        }
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.graph.has_edge(i, j)
    }
}

/// Samples random `t`-regular graphs on `[R]` until the second eigenvalue is at
/// most `c_accept/√t`. `t = R − 1` gives the complete graph directly.
pub fn build_gadget(r: usize, t: usize, seed: u64, c_accept: f64, max_retries: usize) -> Result<PredicateGadget> {
    if t == 0 || t >= r || (r * t) % 2 == 1 {
        return Err(Error::Parameter(format!("need 0 < t < R and t·R even, got R={r}, t={t}")));
    }
    if !(c_accept > 0.0) || max_retries == 0 {
        return Err(Error::Parameter("c_accept and max_retries must be positive".into()));
    }
    let threshold = c_accept / (t as f64).sqrt();
    if t == r - 1 {
        let g = SimpleGraph::complete(r);
        let rho = second_eigenvalue(&g)?;
        if rho <= threshold {
            return Ok(PredicateGadget::from_graph(g, t, rho, 1));
        }
        return Err(Error::Construction(format!(
            "complete graph has second eigenvalue {rho} > {threshold}"
        )));
    }
    let mut best = f64::INFINITY;
    for attempt in 0..max_retries {
        let mut g_rng = rng(derive_seed(seed, attempt as u64));
        let Some(g) = regular::random_regular(r, t, &mut g_rng) else {
            continue;
        };
        // disconnected candidates have eigenvalue 1 on 1⊥
        let rho = second_eigenvalue(&g).unwrap_or(1.0);
        best = best.min(rho);
        if rho <= threshold {
            return Ok(PredicateGadget::from_graph(g, t, rho, attempt + 1));
        }
    }
    Err(Error::Construction(format!(
        "no {t}-regular graph on {r} vertices with second eigenvalue <= {threshold:.6} in {max_retries} tries; best {best:.6}"
    )))
}

/// Per-edge shifts for [`instantiate_csp`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shifts {
    /// `[shift at the smaller endpoint, shift at the larger endpoint]`, one
    /// entry per pattern edge in [`SimpleGraph::edges`] order.
    Explicit(Vec<[usize; 2]>),
    Random(u64),
}

/// `x ⊕ y` on `{1, …, R}`: `x + y` if at most `R`, else `x + y − R`.
pub fn wrap_add(x: usize, y: usize, r: usize) -> usize {
    if x + y <= r {
        x + y
    } else {
        x + y - r
    }
}

/// The 1-based shift that realizes the 0-based rotation `s`.
fn one_based_shift(s: usize, r: usize) -> usize {
    if s == 0 {
        r
    } else {
        s
    }
}

/// CSP over `[R]` on a bipartite pattern, with relation
/// `{(x, y) : (x ⊕ s_u, y ⊕ s_v) ∈ P}` on each edge.
///
/// Labels are 0-based at this boundary; the shift `s ∈ [0, R)` acts as the
/// rotation `x ↦ (x + s) mod R`. Edges are oriented from the color class of
/// the smallest vertex in each component, with ids in pattern-edge order.
pub fn instantiate_csp(gadget: &PredicateGadget, pattern: &SimpleGraph, shifts: &Shifts) -> Result<CspInstance> {
    let r = gadget.r;
    let colors = pattern
        .two_coloring()
        .ok_or_else(|| Error::Structure("pattern graph is not bipartite".into()))?;
    let edges = pattern.edges();
    let shift_list: Vec<[usize; 2]> = match shifts {
        Shifts::Explicit(list) => {
            if list.len() != edges.len() {
                return Err(Error::Parameter(format!("{} shifts for {} edges", list.len(), edges.len())));
            }
            if let Some(bad) = list.iter().flatten().find(|&&s| s >= r) {
                return Err(Error::Parameter(format!("shift {bad} outside [0, {r})")));
            }
            list.clone()
        }
        Shifts::Random(seed) => {
            let mut g = rng(*seed);
            (0..edges.len())
                .map(|_| [g.random_range(0..r), g.random_range(0..r)])
                .collect()
        }
    };
    let mut constraints = Vec::with_capacity(edges.len());
    for (id, (&(a, b), &[sa, sb])) in edges.iter().zip(&shift_list).enumerate() {
        let (ta, tb) = (one_based_shift(sa, r), one_based_shift(sb, r));
        let mut allowed = Vec::with_capacity(r * gadget.t);
        for x in 1..=r {
            for y in 1..=r {
                if gadget.contains(wrap_add(x, ta, r) - 1, wrap_add(y, tb, r) - 1) {
                    allowed.push((x - 1, y - 1));
                }
            }
        }
        let c = if colors[a] {
            Constraint::new(id, b, a, allowed.into_iter().map(|(x, y)| (y, x)))
        } else {
            Constraint::new(id, a, b, allowed)
        };
        constraints.push(c);
    }
    let n = pattern.num_vertices();
    let left = (0..n).filter(|&v| !colors[v]).collect();
    let right = (0..n).filter(|&v| colors[v]).collect();
    CspInstance::new(vec![r; n], constraints, Some(Bipartition::new(left, right)))
}

/// An explicit function `[R]^L → [R]`, tabulated at index `Σ x_i·R^i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestFunction {
    pub l: usize,
    pub r: usize,
    pub table: Vec<usize>,
}

impl TestFunction {
    pub fn from_table(r: usize, l: usize, table: Vec<usize>) -> Result<Self> {
        let size = fourier::table_size(r, l, DEFAULT_TABLE_CAP)?;
        if table.len() != size {
            return Err(Error::Validation(format!("table has {} entries, expected {size}", table.len())));
        }
        if let Some(bad) = table.iter().find(|&&y| y >= r) {
            return Err(Error::Validation(format!("table value {bad} outside [0, {r})")));
        }
        Ok(TestFunction { l, r, table })
    }

    /// `F(x) = x_i`.
    pub fn dictator(r: usize, l: usize, i: usize) -> Result<Self> {
        if i >= l {
            return Err(Error::Parameter(format!("coordinate {i} out of range for L = {l}")));
        }
        let size = fourier::table_size(r, l, DEFAULT_TABLE_CAP)?;
        let stride = r.pow(i as u32);
        Self::from_table(r, l, (0..size).map(|x| x / stride % r).collect())
    }

    pub fn constant(r: usize, l: usize, c: usize) -> Result<Self> {
        let size = fourier::table_size(r, l, DEFAULT_TABLE_CAP)?;
        Self::from_table(r, l, vec![c; size])
    }

    /// Independent uniform value at every point.
    pub fn random(r: usize, l: usize, seed: u64) -> Result<Self> {
        let size = fourier::table_size(r, l, DEFAULT_TABLE_CAP)?;
        let mut g = rng(seed);
        Self::from_table(r, l, (0..size).map(|_| g.random_range(0..r)).collect())
    }

    /// A uniformly random balanced function: every value has `R^{L−1}` preimages.
    pub fn random_balanced(r: usize, l: usize, seed: u64) -> Result<Self> {
        let size = fourier::table_size(r, l, DEFAULT_TABLE_CAP)?;
        let mut table: Vec<usize> = (0..size).map(|x| x % r).collect();
        table.shuffle(&mut rng(seed));
        Self::from_table(r, l, table)
    }

    pub fn eval_index(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn is_balanced(&self) -> bool {
        let mut counts = vec![0usize; self.r];
        for &y in &self.table {
            counts[y] += 1;
        }
        let want = self.table.len() / self.r;
        counts.iter().all(|&c| c == want)
    }

    /// `F_j(x) = 1[F(x) = j]`.
    pub fn indicator(&self, j: usize) -> Vec<f64> {
        self.table.iter().map(|&y| if y == j { 1.0 } else { 0.0 }).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcceptMode {
    Exact { cap: u128 },
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcceptResult {
    /// Accepting outcomes (exact mode) or accepting draws.
    pub accepted: u128,
    pub probability: f64,
    pub total: u128,
}

/// Probability over `(x_i, y_i) ~ μ^{⊗L}`, `μ` uniform on `P`, that `(F(x), F(y)) ∈ P`.
pub fn test_accept_prob(gadget: &PredicateGadget, f: &TestFunction, mode: AcceptMode) -> Result<AcceptResult> {
    if f.r != gadget.r {
        return Err(Error::Parameter(format!("function over [{}] but gadget over [{}]", f.r, gadget.r)));
    }
    let pairs = &gadget.pairs;
    let strides: Vec<usize> = (0..f.l).map(|i| f.r.pow(i as u32)).collect();
    let accepts = |choice: &mut dyn Iterator<Item = usize>| {
        let (mut x, mut y) = (0, 0);
        for (i, p) in choice.enumerate() {
            x += pairs[p].0 * strides[i];
            y += pairs[p].1 * strides[i];
        }
        gadget.contains(f.eval_index(x), f.eval_index(y))
    };
    match mode {
        AcceptMode::Exact { cap } => {
            let total = (pairs.len() as u128).checked_pow(f.l as u32).unwrap_or(u128::MAX);
            if total > cap {
                return Err(Error::SizeLimit {
                    what: "test outcomes".into(),
                    size: total,
                    cap,
                });
            }
            let mut digits = vec![0usize; f.l];
            let mut accepted = 0u128;
            loop {
                if accepts(&mut digits.iter().copied()) {
                    accepted += 1;
                }
                let mut i = 0;
                while i < f.l {
                    digits[i] += 1;
                    if digits[i] < pairs.len() {
                        break;
                    }
                    digits[i] = 0;
                    i += 1;
                }
                if i == f.l {
                    break;
                }
            }
            Ok(AcceptResult {
                accepted,
                probability: accepted as f64 / total as f64,
                total,
            })
        }
        AcceptMode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(Error::Parameter("trials must be positive".into()));
            }
            let mut g = rng(seed);
            let mut accepted = 0u128;
            for _ in 0..trials {
                let draws: Vec<usize> = (0..f.l).map(|_| g.random_range(0..pairs.len())).collect();
                if accepts(&mut draws.into_iter()) {
                    accepted += 1;
                }
            }
            Ok(AcceptResult {
                accepted,
                probability: accepted as f64 / trials as f64,
                total: trials as u128,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{brute_val, DEFAULT_ENUMERATION_CAP};

    #[test]
    fn complete_graph_gadget() {
        for r in 9..=12 {
            let g = build_gadget(r, r - 1, 0, DEFAULT_C_ACCEPT, 1).unwrap();
            assert!((g.rho - 1.0 / (r - 1) as f64).abs() < 1e-9);
            assert_eq!(g.pairs.len(), r * (r - 1));
        }
    }

    #[test]
    fn pair_set_invariants() {
        let g = build_gadget(16, 5, 3, DEFAULT_C_ACCEPT, 100).unwrap();
        assert_eq!(g.pairs.len(), g.t * g.r);
        let mut first = vec![0; g.r];
        let mut second = vec![0; g.r];
        for &(i, j) in &g.pairs {
            assert_ne!(i, j);
            assert!(g.pairs.binary_search(&(j, i)).is_ok());
            first[i] += 1;
            second[j] += 1;
        }
        assert!(first.iter().chain(&second).all(|&c| c == g.t));
        assert!(g.rho <= DEFAULT_C_ACCEPT / (5f64).sqrt());
    }

    #[test]
    fn medium_gadget_is_found() {
        let g = build_gadget(64, 16, 2024, DEFAULT_C_ACCEPT, 100).unwrap();
        assert!(g.rho <= 2.5 / 4.0);
        assert_eq!(g.graph.regular_degree(), Some(16));
        let again = build_gadget(64, 16, 2024, DEFAULT_C_ACCEPT, 100).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn gadget_parameter_errors() {
        assert!(build_gadget(5, 3, 0, 2.5, 10).is_err());
        assert!(build_gadget(5, 5, 0, 2.5, 10).is_err());
        assert!(matches!(build_gadget(20, 4, 0, 1e-6, 3), Err(Error::Construction(_))));
    }

    #[test]
    fn wrap_add_is_rotation() {
        for r in 1..8 {
            for s in 0..r {
                for x in 0..r {
                    assert_eq!(wrap_add(x + 1, one_based_shift(s, r), r) - 1, (x + s) % r);
                }
            }
        }
    }

    fn single_edge() -> SimpleGraph {
        SimpleGraph::from_edges(2, [(0, 1)]).unwrap()
    }

    #[test]
    fn zero_shift_gives_predicate() {
        let g = build_gadget(8, 3, 1, DEFAULT_C_ACCEPT, 100).unwrap();
        let inst = instantiate_csp(&g, &single_edge(), &Shifts::Explicit(vec![[0, 0]])).unwrap();
        let allowed: Vec<_> = inst.edges()[0].allowed.iter().copied().collect();
        assert_eq!(allowed, g.pairs);
        assert_eq!(brute_val(&inst, DEFAULT_ENUMERATION_CAP).unwrap().value, 1.0);
    }

    #[test]
    fn shifts_permute_pairs() {
        let g = build_gadget(8, 3, 1, DEFAULT_C_ACCEPT, 100).unwrap();
        for s in [[1, 0], [3, 5], [7, 7]] {
            let inst = instantiate_csp(&g, &single_edge(), &Shifts::Explicit(vec![s])).unwrap();
            let e = &inst.edges()[0];
            assert_eq!(e.allowed.len(), g.t * g.r);
            for &(x, y) in &e.allowed {
                assert!(g.contains((x + s[0]) % 8, (y + s[1]) % 8));
            }
        }
        assert!(instantiate_csp(&g, &single_edge(), &Shifts::Explicit(vec![[8, 0]])).is_err());
    }

    #[test]
    fn pattern_orientation() {
        let g = build_gadget(6, 2, 4, 10.0, 100).unwrap();
        let path = SimpleGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let inst = instantiate_csp(&g, &path, &Shifts::Random(9)).unwrap();
        assert_eq!(inst.bipartition().unwrap().left, vec![0, 2]);
        assert!(inst.edges().iter().all(|e| e.allowed.len() == 12));
        assert!(instantiate_csp(&g, &SimpleGraph::complete(3), &Shifts::Random(0)).is_err());
    }

    #[test]
    fn dictators_always_pass() {
        let g = build_gadget(6, 3, 2, DEFAULT_C_ACCEPT, 100).unwrap();
        for l in 1..=2 {
            for i in 0..l {
                let f = TestFunction::dictator(6, l, i).unwrap();
                assert!(f.is_balanced());
                let res = test_accept_prob(&g, &f, AcceptMode::Exact { cap: DEFAULT_EXACT_ACCEPT_CAP }).unwrap();
                assert_eq!(res.accepted, res.total);
                assert_eq!(res.probability, 1.0);
            }
        }
    }

    #[test]
    fn constants_never_pass() {
        let g = build_gadget(6, 3, 2, DEFAULT_C_ACCEPT, 100).unwrap();
        let f = TestFunction::constant(6, 2, 4).unwrap();
        assert!(!f.is_balanced());
        let exact = test_accept_prob(&g, &f, AcceptMode::Exact { cap: DEFAULT_EXACT_ACCEPT_CAP }).unwrap();
        assert_eq!(exact.accepted, 0);
        let mc = test_accept_prob(&g, &f, AcceptMode::MonteCarlo { trials: 1000, seed: 1 }).unwrap();
        assert_eq!(mc.probability, 0.0);
    }

    #[test]
    fn random_functions_average_t_over_r() {
        let g = build_gadget(8, 3, 7, DEFAULT_C_ACCEPT, 100).unwrap();
        let draws = 1000;
        let mean: f64 = (0..draws)
            .map(|s| {
                let f = TestFunction::random(8, 1, s).unwrap();
                test_accept_prob(&g, &f, AcceptMode::Exact { cap: 1000 }).unwrap().probability
            })
            .sum::<f64>()
            / draws as f64;
        // per-function variance is at most 1/4
        assert!((mean - 0.375).abs() < 4.0 * (0.25f64 / draws as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn exact_cap() {
        let g = build_gadget(8, 3, 7, DEFAULT_C_ACCEPT, 100).unwrap();
        let f = TestFunction::dictator(8, 3, 0).unwrap();
        assert!(matches!(
            test_accept_prob(&g, &f, AcceptMode::Exact { cap: 1000 }),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn monte_carlo_close_to_exact() {
        let g = build_gadget(4, 2, 0, 10.0, 100).unwrap();
        let f = TestFunction::random_balanced(4, 2, 11).unwrap();
        assert!(f.is_balanced());
        let exact = test_accept_prob(&g, &f, AcceptMode::Exact { cap: 1000 }).unwrap().probability;
        let mc = test_accept_prob(&g, &f, AcceptMode::MonteCarlo { trials: 40_000, seed: 3 }).unwrap().probability;
        assert!((exact - mc).abs() < 4.0 * (0.25f64 / 40_000.0).sqrt());
    }

    #[test]
    fn dictator_influence_profile() {
        let r = 4;
        let f = TestFunction::dictator(r, 3, 1).unwrap();
        let want = (1.0 / r as f64) * (1.0 - 1.0 / r as f64);
        for j in 0..r {
            let es = efron_stein(&f.indicator(j), r, 3, DEFAULT_TABLE_CAP).unwrap();
            assert!((es.influence(1, Some(1)).unwrap() - want).abs() < 1e-12);
            assert!(es.influence(0, None).unwrap().abs() < 1e-12);
            assert!(es.influence(2, None).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn mu_marginals_are_uniform() {
        let g = build_gadget(10, 4, 5, DEFAULT_C_ACCEPT, 100).unwrap();
        let mut counts = vec![0usize; 10];
        for &(i, _) in &g.pairs {
            counts[i] += 1;
        }
        assert!(counts.iter().all(|&c| c * 10 == g.pairs.len()));
    }
}
