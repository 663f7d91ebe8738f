//! Ground-truth solvers and concentration-inequality evaluators.

mod bounds;
mod brute;

pub use bounds::{
    binomial_tail_exact, chernoff_bound, clip_excess, monte_carlo_tail, monte_carlo_tail_split, ClipMode,
    MonteCarloEstimate,
};
pub use brute::{brute_cval, brute_val, BruteCval, BruteVal, DEFAULT_ENUMERATION_CAP};
