use serde::{Deserialize, Serialize};

use crate::csp::{Assignment, CspInstance, PartialAssignment};
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_CAP: u128 = 2_000_000;

/// Exact optimum found by enumeration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteVal {
    pub satisfied: usize,
    pub edges: usize,
    pub value: f64,
    /// Lexicographically first optimal assignment.
    pub witness: Assignment,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteCval {
    pub size: usize,
    /// First maximum consistent partial assignment in enumeration order (⊥ before labels).
    pub witness: PartialAssignment,
}

/// Dense lookup of allowed pairs for fast enumeration.
struct Tables {
    ends: Vec<(usize, usize)>,
    widths: Vec<usize>,
    bits: Vec<Vec<bool>>,
}

impl Tables {
    fn new(inst: &CspInstance) -> Self {
        let mut ends = Vec::new();
        let mut widths = Vec::new();
        let mut bits = Vec::new();
        for e in inst.edges() {
            let (su, sv) = (inst.alphabet(e.u), inst.alphabet(e.v));
            let mut table = vec![false; su * sv];
            for &(a, b) in &e.allowed {
                table[a * sv + b] = true;
            }
            ends.push((e.u, e.v));
            widths.push(sv);
            bits.push(table);
        }
        Tables { ends, widths, bits }
    }

    #[inline]
    fn ok(&self, i: usize, a: usize, b: usize) -> bool {
        self.bits[i][a * self.widths[i] + b]
    }
}

fn space_size(radices: impl Iterator<Item = usize>) -> u128 {
    radices.fold(1u128, |acc, r| acc.saturating_mul(r as u128))
}

/// `val(Π)` by enumerating every assignment.
pub fn brute_val(inst: &CspInstance, cap: u128) -> Result<BruteVal> {
    if inst.edge_count() == 0 {
        return Err(Error::Degenerate("instance has no edges; value is undefined".into()));
    }
    let n = inst.num_vertices();
    let total = space_size(inst.alphabets().iter().copied());
    if total > cap {
        return Err(Error::SizeLimit {
            what: "assignment space".into(),
            size: total,
            cap,
        });
    }
    let tables = Tables::new(inst);
    let mut labels = vec![0usize; n];
    let mut best = (0usize, labels.clone());
    let mut first = true;
    loop {
        let sat = tables
            .ends
            .iter()
            .enumerate()
            .filter(|&(i, &(u, v))| tables.ok(i, labels[u], labels[v]))
            .count();
        if first || sat > best.0 {
            best = (sat, labels.clone());
            first = false;
            if sat == inst.edge_count() {
                break;
            }
        }
        if !advance(&mut labels, |v| inst.alphabet(v)) {
            break;
        }
    }
    Ok(BruteVal {
        satisfied: best.0,
        edges: inst.edge_count(),
        value: best.0 as f64 / inst.edge_count() as f64,
        witness: Assignment(best.1),
    })
}

/// `cval(Π)`: the largest consistent partial assignment, by enumeration.
pub fn brute_cval(inst: &CspInstance, cap: u128) -> Result<BruteCval> {
    let n = inst.num_vertices();
    let total = space_size(inst.alphabets().iter().map(|&s| s + 1));
    if total > cap {
        return Err(Error::SizeLimit {
            what: "partial assignment space".into(),
            size: total,
            cap,
        });
    }
    let tables = Tables::new(inst);
    // digit 0 = ⊥, digit k = label k - 1
    let mut digits = vec![0usize; n];
    let mut best: Option<(usize, Vec<usize>)> = None;
    loop {
        let size = digits.iter().filter(|&&d| d > 0).count();
        if best.as_ref().is_none_or(|b| size > b.0) {
            let consistent = tables.ends.iter().enumerate().all(|(i, &(u, v))| {
                digits[u] == 0 || digits[v] == 0 || tables.ok(i, digits[u] - 1, digits[v] - 1)
            });
            if consistent {
                best = Some((size, digits.clone()));
                if size == n {
                    break;
                }
            }
        }
        if !advance(&mut digits, |v| inst.alphabet(v) + 1) {
            break;
        }
    }
    let (size, digits) = best.expect("the empty partial assignment is consistent");
    Ok(BruteCval {
        size,
        witness: PartialAssignment(digits.into_iter().map(|d| d.checked_sub(1)).collect()),
    })
}

/// Mixed-radix increment, last position fastest. Returns false after the last tuple.
fn advance(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for v in (0..digits.len()).rev() {
        digits[v] += 1;
        if digits[v] < radix(v) {
            return true;
        }
        digits[v] = 0;
    }
    false
}
