use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on `R^L` for explicit tables.
pub const DEFAULT_TABLE_CAP: u128 = 1 << 20;

/// Efron–Stein components of a function on `[R]^L` under the uniform measure.
///
/// `components[S]` is the table of `f_S`, with `S` a bitmask over coordinates
/// and tables indexed by `Σ x_i·R^i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfronStein {
    pub components: Vec<Vec<f64>>,
    pub l: usize,
    pub r: usize,
}

pub(crate) fn table_size(r: usize, l: usize, cap: u128) -> Result<usize> {
    let size = (r as u128).checked_pow(l as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::SizeLimit {
            what: "function table".into(),
            size,
            cap,
        });
    }
    Ok(size as usize)
}

/// Averages out coordinate `i` of a table over `[R]^L`.
fn average_out(g: &[f64], r: usize, i: usize) -> Vec<f64> {
    let stride = r.pow(i as u32);
    let mut out = vec![0.0; g.len()];
    for (x, slot) in out.iter_mut().enumerate() {
        let base = x - (x / stride % r) * stride;
        *slot = (0..r).map(|a| g[base + a * stride]).sum::<f64>() / r as f64;
    }
    out
}

/// Decomposes `f` via `f_S = Σ_{T⊆S} (−1)^{|S∖T|} E[f | x_T]`.
pub fn efron_stein(f: &[f64], r: usize, l: usize, cap: u128) -> Result<EfronStein> {
    if r == 0 || l >= 20 {
        return Err(Error::Parameter(format!("need R ≥ 1 and L < 20, got R={r}, L={l}")));
    }
    let size = table_size(r, l, cap)?;
    if f.len() != size {
        return Err(Error::Validation(format!("table has {} entries, expected {size}", f.len())));
    }
    let full = (1usize << l) - 1;
    // conditional expectations, computed from the full set downwards
    let mut cond: Vec<Vec<f64>> = vec![Vec::new(); full + 1];
    cond[full] = f.to_vec();
    for t in (0..full).rev() {
        let i = (!t).trailing_zeros() as usize;
        cond[t] = average_out(&cond[t | 1 << i], r, i);
    }
    let mut components = Vec::with_capacity(full + 1);
    for s in 0..=full {
        let mut fs = vec![0.0; size];
        let mut t = s;
        loop {
            let sign = if (s & !t).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            for (acc, c) in fs.iter_mut().zip(&cond[t]) {
                *acc += sign * c;
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & s;
        }
        components.push(fs);
    }
    Ok(EfronStein { components, l, r })
}

impl EfronStein {
    /// `‖f_S‖₂²` under the uniform measure.
    pub fn norm_sq(&self, s: usize) -> f64 {
        let c = &self.components[s];
        c.iter().map(|x| x * x).sum::<f64>() / c.len() as f64
    }

    /// `Σ_{S ∋ i, |S| ≤ cap} ‖f_S‖₂²`.
    pub fn influence(&self, i: usize, degree_cap: Option<usize>) -> Result<f64> {
        if i >= self.l {
            return Err(Error::Parameter(format!("coordinate {i} out of range for L = {}", self.l)));
        }
        Ok((0..self.components.len())
            .filter(|s| s >> i & 1 == 1)
            .filter(|s| degree_cap.is_none_or(|d| s.count_ones() as usize <= d))
            .map(|s| self.norm_sq(s))
            .sum())
    }
}

/// Influence of coordinate `i` on `f`, optionally restricted to degree `≤ degree_cap`.
pub fn influence(f: &[f64], r: usize, l: usize, i: usize, degree_cap: Option<usize>, cap: u128) -> Result<f64> {
    efron_stein(f, r, l, cap)?.influence(i, degree_cap)
}
