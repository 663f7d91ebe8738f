//! Bounded-degree Max 2-CSP and claw-free independent set toolkit.
//!
//! Instance transformations (copy expansion, bipartite doubling, subsampling
//! degree reduction, FGLSS and label-extended graphs), the forest-sampling
//! `(d+1)/2`-approximation for `d`-bounded-degree 2-CSP, brute-force oracles,
//! concentration-bound evaluators, the expander dictatorship-test gadget, and
//! seeded end-to-end pipelines.

pub mod approx;
pub mod csp;
pub mod dictator;
pub mod error;
pub mod graph;
pub mod oracles;
pub mod pipeline;
pub mod reductions;
pub mod util;

pub use error::{Error, Result};
