use std::collections::BTreeSet;

use rand::Rng as _;

use crate::graph::SimpleGraph;
use crate::util::Rng;

const RESTARTS: usize = 200;

/// Random simple `t`-regular graph on `r` vertices by sequential stub pairing:
/// pick two random open stubs, pair them if that keeps the graph simple, and
/// restart from scratch when a run gets stuck. `None` if every restart fails.
pub(crate) fn random_regular(r: usize, t: usize, rng: &mut Rng) -> Option<SimpleGraph> {
    if t == 0 || t >= r || (r * t) % 2 == 1 {
        return None;
    }
    'restart: for _ in 0..RESTARTS {
        let mut stubs: Vec<usize> = (0..r).flat_map(|v| std::iter::repeat_n(v, t)).collect();
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        while !stubs.is_empty() {
            let mut paired = false;
            for _ in 0..50 * stubs.len() {
                let i = rng.random_range(0..stubs.len());
                let j = rng.random_range(0..stubs.len());
                let (u, v) = (stubs[i], stubs[j]);
                if i == j || u == v || edges.contains(&(u.min(v), u.max(v))) {
                    continue;
                }
                edges.insert((u.min(v), u.max(v)));
                stubs.swap_remove(i.max(j));
                stubs.swap_remove(i.min(j));
                paired = true;
                break;
            }
            if !paired {
                continue 'restart;
            }
        }
        return SimpleGraph::from_edges(r, edges).ok();
    }
    None
}
