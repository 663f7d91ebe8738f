//! Degree reduction by edge subsampling.
//!
//! Each edge of a `(d_A·C, d_B·C)`-biregular instance is kept independently
//! with probability `p`; afterwards every left vertex above `d_A` and then
//! every right vertex above `d_B` sheds its largest-id edges until it meets
//! the bound. The parameter ledger below records every quantity the
//! probabilistic analysis of this step depends on.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::csp::{validate_degrees, Assignment, CspInstance, DegreeMode};
use crate::error::{Error, Result};
use crate::util::rng;

/// Inputs from which the ledger is derived.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamInputs {
    pub delta: f64,
    pub nu: f64,
    /// Exponent relating the right alphabet size to the left one (`R^t`).
    pub t: f64,
    /// Degree blow-up factor `C` of the input.
    pub c: usize,
    pub d_a: usize,
    pub d_b: usize,
    /// Number of left vertices `|A'|`.
    pub a_size: usize,
    pub override_lambda: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamMode {
    /// No overrides and `d_A, d_B ≥ d₀`.
    FullScale,
    DeskScale,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    pub lambda: Option<f64>,
    pub p: Option<f64>,
}

/// The full parameter ledger of the subsampling reduction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsampleParams {
    pub inputs: ParamInputs,
    pub lambda: f64,
    pub p: f64,
    pub d0: f64,
    pub chi: f64,
    /// `R₀`, or `None` when it overflows `f64`; see `log10_r0`.
    pub r0: Option<f64>,
    pub log10_r0: f64,
    pub n_e: usize,
    pub overrides: Overrides,
    pub mode: ParamMode,
    /// `λ²·n_E ≥ 100`, the premise behind the 0.01 failure bounds at desk scale.
    pub premise_concentration: bool,
    /// `C·p = 1 − λ`.
    pub premise_sampling_rate: bool,
}

/// Derives `λ, p, d₀, χ, R₀, n_E` from the reduction inputs.
///
/// `λ = 0.001·min{δ, ν}` (or the override), `p = (1−λ)/C`, `d₀ = 10000/λ³`,
/// `χ = (1/d_A + t/d_B)/(ν − 2λ)`, `n_E = d_A·|A'|`, and
/// `R₀ = max{(e/χ)^{1/λ}, 100^{1/|1/d_A + t/d_B − (ν−λ)χ|}}`.
pub fn subsample_params(inputs: &ParamInputs) -> Result<SubsampleParams> {
    let ParamInputs { delta, nu, t, c, d_a, d_b, a_size, override_lambda } = *inputs;
    if !(0.0 < delta && delta < nu && nu <= 1.0) {
        return Err(Error::Parameter(format!("need 0 < delta < nu <= 1, got delta={delta}, nu={nu}")));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Parameter(format!("t = {t} outside (0, 1]")));
    }
    if c == 0 || d_a == 0 || d_b == 0 {
        return Err(Error::Parameter("C, d_A and d_B must be positive".into()));
    }
    let lambda = match override_lambda {
        Some(l) if l > 0.0 && l < 1.0 => l,
        Some(l) => return Err(Error::Parameter(format!("lambda override {l} outside (0, 1)"))),
        None => 0.001 * delta.min(nu),
    };
    if nu <= 2.0 * lambda {
        return Err(Error::Parameter(format!("nu = {nu} <= 2·lambda = {}; chi undefined", 2.0 * lambda)));
    }
    let p = (1.0 - lambda) / c as f64;
    let d0 = 10_000.0 / lambda.powi(3);
    let slack = 1.0 / d_a as f64 + t / d_b as f64;
    let chi = slack / (nu - 2.0 * lambda);
    // The printed exponent denominator is negative by construction of chi; use its magnitude.
    let denom = (slack - (nu - lambda) * chi).abs();
    let log10_first = (std::f64::consts::E / chi).log10() / lambda;
    let log10_second = 2.0 / denom;
    let log10_r0 = log10_first.max(log10_second);
    let r0 = (log10_r0 < 300.0).then(|| 10f64.powf(log10_r0));
    let n_e = d_a * a_size;
    let full = override_lambda.is_none() && d_a as f64 >= d0 && d_b as f64 >= d0;
    Ok(SubsampleParams {
        inputs: inputs.clone(),
        lambda,
        p,
        d0,
        chi,
        r0,
        log10_r0,
        n_e,
        overrides: Overrides { lambda: override_lambda, p: None },
        mode: if full { ParamMode::FullScale } else { ParamMode::DeskScale },
        premise_concentration: lambda * lambda * n_e as f64 >= 100.0,
        premise_sampling_rate: true,
    })
}

impl SubsampleParams {
    /// Forces the sampling probability. `p = 0` is accepted and yields an empty edge set.
    pub fn with_forced_p(mut self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter(format!("forced p = {p} outside [0, 1]")));
        }
        self.p = p;
        self.overrides.p = Some(p);
        self.mode = ParamMode::DeskScale;
        self.premise_sampling_rate = ((self.inputs.c as f64) * p - (1.0 - self.lambda)).abs() < 1e-12;
        Ok(self)
    }
}

/// Diagnostics of one subsampling run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub seed: u64,
    pub input_edges: usize,
    /// `|E₁|`.
    pub kept_edges: usize,
    /// `|E₁ \ E''|`.
    pub removed_for_degree: usize,
    pub output_edges: usize,
    pub n_e: usize,
    pub lambda: f64,
    /// `|E₁| ∈ [(1 − 2λ)n_E, n_E]`.
    pub event_e1: bool,
    /// `|E₁ \ E''| < λ|E₁|`.
    pub event_e2: bool,
    /// `|E₁(ψ*)| ≥ (val(ψ*) − 2λ)·n_E` for a supplied reference assignment.
    pub planted_event_e3: Option<bool>,
    /// `|E₁(ψ*)|`.
    pub reference_kept_satisfied: Option<usize>,
    pub mode: ParamMode,
}

impl ReductionReport {
    /// Recomputes the event indicators from the counts.
    pub fn events_from_counts(kept: usize, removed: usize, n_e: usize, lambda: f64) -> (bool, bool) {
        let e1 = kept as f64 >= (1.0 - 2.0 * lambda) * n_e as f64 && kept <= n_e;
        let e2 = (removed as f64) < lambda * kept as f64;
        (e1, e2)
    }
}

/// Runs the subsampling reduction. The output keeps the input's vertices,
/// alphabets, bipartition and edge ids, and is always `(d_A, d_B)`-bounded.
pub fn subsample_reduce(
    inst: &CspInstance,
    params: &SubsampleParams,
    seed: u64,
    reference: Option<&Assignment>,
) -> Result<(CspInstance, ReductionReport)> {
    let ParamInputs { c, d_a, d_b, .. } = params.inputs;
    let required = DegreeMode::Biregular { left: d_a * c, right: d_b * c };
    if !validate_degrees(inst, required).0 {
        return Err(Error::Precondition(format!(
            "input must be ({}, {})-biregular bipartite",
            d_a * c,
            d_b * c
        )));
    }
    let p = params.p;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("p = {p} outside [0, 1]")));
    }
    if let Some(psi) = reference {
        psi.validate(inst)?;
    }

    let mut r = rng(seed);
    let edges = inst.edges();
    let mut kept: Vec<bool> = edges.iter().map(|_| r.random::<f64>() < p).collect();
    let kept_count = kept.iter().filter(|&&k| k).count();
    let sampled = kept.clone();

    let incidence = inst.incidence();
    let bp = inst.bipartition().expect("validated bipartite");
    let mut removed = 0;
    for (side, bound) in [(&bp.left, d_a), (&bp.right, d_b)] {
        for &x in side {
            // incidence lists are in edge (= id) order
            let live: Vec<usize> = incidence[x].iter().copied().filter(|&i| kept[i]).collect();
            if live.len() > bound {
                for &i in &live[bound..] {
                    kept[i] = false;
                    removed += 1;
                }
            }
        }
    }

    let (event_e1, event_e2) = ReductionReport::events_from_counts(kept_count, removed, params.n_e, params.lambda);
    let (planted_event_e3, reference_kept_satisfied) = match reference {
        Some(psi) => {
            let val_ref = inst.value(psi)?;
            let kept_sat = edges
                .iter()
                .zip(&sampled)
                .filter(|(e, &s)| s && e.accepts(psi.0[e.u], psi.0[e.v]))
                .count();
            let e3 = kept_sat as f64 >= (val_ref - 2.0 * params.lambda) * params.n_e as f64;
            (Some(e3), Some(kept_sat))
        }
        None => (None, None),
    };

    let out_edges: Vec<_> = edges
        .iter()
        .zip(&kept)
        .filter(|(_, &k)| k)
        .map(|(e, _)| e.clone())
        .collect();
    let output_edges = out_edges.len();
    let out = CspInstance::new(inst.alphabets().to_vec(), out_edges, inst.bipartition().cloned())?;
    debug_assert!(validate_degrees(&out, DegreeMode::BoundedBipartite { left: d_a, right: d_b }).0);
    Ok((
        out,
        ReductionReport {
            seed,
            input_edges: edges.len(),
            kept_edges: kept_count,
            removed_for_degree: removed,
            output_edges,
            n_e: params.n_e,
            lambda: params.lambda,
            event_e1,
            event_e2,
            planted_event_e3,
            reference_kept_satisfied,
            mode: params.mode,
        },
    ))
}
