use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DENOMINATOR_LIMIT: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeBalance {
    pub d_a: usize,
    pub d_b: usize,
    pub q1: u64,
    pub q2: u64,
}

/// Splits a claw budget `k` into side degrees `d_A ≈ √2·d_B` with `d_A + d_B ≤ k`.
///
/// `(q1, q2)` is the first continued-fraction convergent of √2 within `0.01·ε`
/// of both `√2` and `1/√2`.
pub fn balance_degrees(k: usize, eps: f64) -> Result<DegreeBalance> {
    let upper = 1.0 / (3.0 + 2.0 * std::f64::consts::SQRT_2);
    if !(eps > 0.0 && eps < upper) {
        return Err(Error::Parameter(format!("epsilon {eps} outside (0, {upper:.6})")));
    }
    if k < 3 {
        return Err(Error::Parameter(format!("k = {k} must be at least 3")));
    }
    let tol = 0.01 * eps;
    let (mut p, mut q) = (1u64, 1u64);
    while q <= DENOMINATOR_LIMIT {
        let r = p as f64 / q as f64;
        if (r - std::f64::consts::SQRT_2).abs() <= tol && (1.0 / r - std::f64::consts::FRAC_1_SQRT_2).abs() <= tol {
            return Ok(degrees_for_ratio(k, p, q));
        }
        (p, q) = (p + 2 * q, p + q);
    }
    Err(Error::Parameter(format!(
        "no convergent of sqrt(2) within {tol} below denominator {DENOMINATOR_LIMIT}"
    )))
}

/// `d_A = ⌊k·q1/(q1+q2)⌋`, `d_B = ⌊k·q2/(q1+q2)⌋`.
pub fn degrees_for_ratio(k: usize, q1: u64, q2: u64) -> DegreeBalance {
    let total = (q1 + q2) as u128;
    DegreeBalance {
        d_a: (k as u128 * q1 as u128 / total) as usize,
        d_b: (k as u128 * q2 as u128 / total) as usize,
        q1,
        q2,
    }
}
