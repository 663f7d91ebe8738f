//! Seeded end-to-end runs: bounded-degree 2-CSP hardness chain, the
//! claw-free independent set chain, approximation ratio runs, and sweeps.

mod sweep;

use serde::{Deserialize, Serialize};

use crate::approx::approx_solve;
use crate::csp::{
    biregular_degrees, gen_planted, gen_random, validate_degrees, Assignment, CspInstance, DegreeMode, PlantedSpec,
    RandomSpec,
};
use crate::error::{Error, Result};
use crate::graph::{find_claw, indep_exact, ClawWitness, SolverConfig};
use crate::oracles::{brute_val, DEFAULT_ENUMERATION_CAP};
use crate::reductions::{
    balance_degrees, copy_expand, fglss, subsample_params, subsample_reduce, DegreeBalance, ParamInputs,
    ReductionReport, SubsampleParams,
};
use crate::util::sha256_hex;

pub use sweep::{experiment_sweep, SweepAxis, SweepCell, SweepConfig, SweepRow, SweepSummary};

/// Where a pipeline gets its input instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputSpec {
    Planted(PlantedSpec),
    Random(RandomSpec),
    Instance {
        instance: CspInstance,
        #[serde(default)]
        reference: Option<Assignment>,
    },
}

impl InputSpec {
    /// The instance plus a reference assignment when one is known.
    pub fn resolve(&self) -> Result<(CspInstance, Option<Assignment>)> {
        match self {
            InputSpec::Planted(spec) => {
                let p = gen_planted(spec)?;
                Ok((p.instance, Some(p.planted)))
            }
            InputSpec::Random(spec) => Ok((gen_random(spec)?, None)),
            InputSpec::Instance { instance, reference } => {
                if let Some(r) = reference {
                    r.validate(instance)?;
                }
                Ok((instance.clone(), reference.clone()))
            }
        }
    }
}

fn default_exact_cap() -> u64 {
    DEFAULT_ENUMERATION_CAP as u64
}

fn default_graph_cap() -> usize {
    crate::graph::DEFAULT_EXACT_CAP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UgConfig {
    pub d: usize,
    pub eps: f64,
    #[serde(default = "default_exact_cap")]
    pub exact_cap: u64,
    #[serde(default)]
    pub force_p: Option<f64>,
    pub input: InputSpec,
    #[serde(default)]
    pub override_lambda: Option<f64>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NpConfig {
    pub eps: f64,
    #[serde(default = "default_exact_cap")]
    pub exact_cap: u64,
    #[serde(default)]
    pub force_p: Option<f64>,
    /// Vertex limit for exact claw search neighborhoods and independent set.
    #[serde(default = "default_graph_cap")]
    pub graph_cap: usize,
    pub input: InputSpec,
    pub k: usize,
    #[serde(default)]
    pub override_lambda: Option<f64>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxConfig {
    pub d: usize,
    #[serde(default = "default_exact_cap")]
    pub exact_cap: u64,
    pub input: InputSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "pipeline")]
pub enum PipelineConfig {
    #[serde(rename = "ug_2csp")]
    Ug2Csp(UgConfig),
    #[serde(rename = "np_clawfree")]
    NpClawFree(NpConfig),
    #[serde(rename = "approx")]
    Approx(ApproxConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "pipeline")]
pub enum PipelineReport {
    #[serde(rename = "ug_2csp")]
    Ug2Csp(UgReport),
    #[serde(rename = "np_clawfree")]
    NpClawFree(NpReport),
    #[serde(rename = "approx")]
    Approx(ApproxReport),
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl PipelineReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineReport> {
    Ok(match config {
        PipelineConfig::Ug2Csp(c) => PipelineReport::Ug2Csp(pipeline_ug_2csp(c)?),
        PipelineConfig::NpClawFree(c) => PipelineReport::NpClawFree(pipeline_np_clawfree(c)?),
        PipelineConfig::Approx(c) => PipelineReport::Approx(pipeline_approx(c)?),
    })
}

/// Content hash and size of one intermediate object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub edges: usize,
    pub hash: String,
    pub stage: String,
    pub vertices: usize,
}

impl StageRecord {
    fn instance(stage: &str, inst: &CspInstance) -> Self {
        StageRecord {
            edges: inst.edge_count(),
            hash: inst.content_hash(),
            stage: stage.into(),
            vertices: inst.num_vertices(),
        }
    }
}

/// Exact optimum when the labeling space fits `cap`; `None` when too large or edgeless.
fn exact_value(inst: &CspInstance, cap: u64) -> Result<Option<(f64, usize)>> {
    match brute_val(inst, cap as u128) {
        Ok(b) => Ok(Some((b.value, b.satisfied))),
        Err(Error::SizeLimit { .. }) | Err(Error::Degenerate(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn value_or_none(inst: &CspInstance, psi: &Assignment) -> Result<Option<f64>> {
    match inst.value(psi) {
        Ok(v) => Ok(Some(v)),
        Err(Error::Degenerate(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Shared front half: expand by copies, then subsample down to `(d_a, d_b)`.
struct Reduced {
    input: CspInstance,
    expanded: CspInstance,
    output: CspInstance,
    reference: Option<Assignment>,
    expanded_reference: Option<Assignment>,
    params: SubsampleParams,
    reduction: ReductionReport,
}

#[allow(clippy::too_many_arguments)]
fn expand_and_subsample(
    input_spec: &InputSpec,
    c1: usize,
    c2: usize,
    (d_a, d_b): (usize, usize),
    (delta, nu, t): (f64, f64, f64),
    override_lambda: Option<f64>,
    force_p: Option<f64>,
    seed: u64,
) -> Result<Reduced> {
    let (input, reference) = input_spec.resolve()?;
    let (d1, d2) = biregular_degrees(&input)
        .ok_or_else(|| Error::Precondition("input must be a biregular bipartite instance".into()))?;
    let expanded = copy_expand(&input, c1, c2)?;
    let expanded_reference = reference.as_ref().map(|r| expanded.lift(r));
    let a_size = expanded.instance.bipartition().map_or(0, |b| b.left.len());
    let mut params = subsample_params(&ParamInputs {
        delta,
        nu,
        t,
        c: d1 * d2,
        d_a,
        d_b,
        a_size,
        override_lambda,
    })?;
    if let Some(p) = force_p {
        params = params.with_forced_p(p)?;
    }
    let (output, reduction) = subsample_reduce(&expanded.instance, &params, seed, expanded_reference.as_ref())?;
    Ok(Reduced {
        input,
        expanded: expanded.instance,
        output,
        reference,
        expanded_reference,
        params,
        reduction,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Completeness {
    /// `val(Π')` of the reference assignment.
    pub expanded_reference_value: Option<f64>,
    /// `val(Π'')` of the reference assignment, a lower bound on `val(Π'')`.
    pub output_reference_value: Option<f64>,
    /// Output reference value `≥ val(Π') − δ`.
    pub within_delta: Option<bool>,
    /// Output reference value `≥ target`.
    pub meets_target: Option<bool>,
    pub target: f64,
}

fn completeness(r: &Reduced, delta: f64, target: f64) -> Result<Completeness> {
    let (expanded_reference_value, output_reference_value) = match &r.expanded_reference {
        Some(psi) => (value_or_none(&r.expanded, psi)?, value_or_none(&r.output, psi)?),
        None => (None, None),
    };
    let within_delta = match (expanded_reference_value, output_reference_value) {
        (Some(before), Some(after)) => Some(after >= before - delta),
        _ => None,
    };
    Ok(Completeness {
        expanded_reference_value,
        output_reference_value,
        within_delta,
        meets_target: output_reference_value.map(|v| v >= target),
        target,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UgReport {
    pub completeness: Completeness,
    pub config: UgConfig,
    /// Output is `(d, d)`-bounded.
    pub degree_ok: bool,
    pub input_value_exact: Option<f64>,
    pub output_value_exact: Option<f64>,
    pub params: SubsampleParams,
    pub reduction: ReductionReport,
    pub reference_value_input: Option<f64>,
    pub stages: Vec<StageRecord>,
}

/// Copy expansion with `c₁ = c₂ = d`, subsampling to `(d, d)` with
/// `t = 1, δ = 0.01ε, ν = 1 − δ`, then degree and completeness checks.
pub fn pipeline_ug_2csp(cfg: &UgConfig) -> Result<UgReport> {
    if cfg.d == 0 || !(cfg.eps > 0.0 && cfg.eps < 1.0) {
        return Err(Error::Parameter(format!("need d ≥ 1 and ε ∈ (0, 1), got d={}, ε={}", cfg.d, cfg.eps)));
    }
    let delta = 0.01 * cfg.eps;
    let r = expand_and_subsample(
        &cfg.input,
        cfg.d,
        cfg.d,
        (cfg.d, cfg.d),
        (delta, 1.0 - delta, 1.0),
        cfg.override_lambda,
        cfg.force_p,
        cfg.seed,
    )?;
    let degree_ok = validate_degrees(&r.output, DegreeMode::BoundedBipartite { left: cfg.d, right: cfg.d }).0;
    let completeness = completeness(&r, delta, 1.0 - 0.02 * cfg.eps)?;
    let reference_value_input = match &r.reference {
        Some(psi) => value_or_none(&r.input, psi)?,
        None => None,
    };
    Ok(UgReport {
        completeness,
        config: cfg.clone(),
        degree_ok,
        input_value_exact: exact_value(&r.input, cfg.exact_cap)?.map(|v| v.0),
        output_value_exact: exact_value(&r.output, cfg.exact_cap)?.map(|v| v.0),
        reference_value_input,
        stages: vec![
            StageRecord::instance("input", &r.input),
            StageRecord::instance("copy_expanded", &r.expanded),
            StageRecord::instance("subsampled", &r.output),
        ],
        params: r.params,
        reduction: r.reduction,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClawCheck {
    /// `Some(true)` when no induced claw of this order exists, `None` when the search hit a size cap.
    pub claw_free: Option<bool>,
    pub order: usize,
    pub witness: Option<ClawWitness>,
}

fn claw_check(g: &crate::graph::SimpleGraph, order: usize, cap: usize) -> Result<ClawCheck> {
    match find_claw(g, order, &SolverConfig { cap }) {
        Ok(w) => Ok(ClawCheck {
            claw_free: Some(w.is_none()),
            order,
            witness: w,
        }),
        Err(Error::SizeLimit { .. }) => Ok(ClawCheck {
            claw_free: None,
            order,
            witness: None,
        }),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndepCheck {
    pub equal: bool,
    pub indep: usize,
    /// `val(Π'')·|E''|`, the optimal number of satisfied constraints.
    pub val_times_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NpReport {
    pub balance: DegreeBalance,
    /// Claw search at `d_A + d_B`.
    pub claw_at_degree_sum: Option<ClawCheck>,
    /// Claw search at `k`.
    pub claw_at_k: Option<ClawCheck>,
    pub completeness: Completeness,
    pub config: NpConfig,
    pub degree_ok: bool,
    pub degree_sum_within_k: bool,
    pub fglss_edges: Option<usize>,
    pub fglss_hash: Option<String>,
    pub fglss_vertices: Option<usize>,
    pub indep: Option<IndepCheck>,
    pub params: SubsampleParams,
    pub reduction: ReductionReport,
    pub stages: Vec<StageRecord>,
}

/// Degree balancing, copy expansion to `(d_A·d₁d₂, d_B·d₁d₂)`, subsampling to
/// `(d_A, d_B)` with `t = 1/2, δ = 0.01ε, ν = 1/2 − δ`, then the FGLSS graph
/// with claw-freeness and `indep = val·|E|` checks where exact solving fits.
pub fn pipeline_np_clawfree(cfg: &NpConfig) -> Result<NpReport> {
    let balance = balance_degrees(cfg.k, cfg.eps)?;
    let (d_a, d_b) = (balance.d_a, balance.d_b);
    let delta = 0.01 * cfg.eps;
    // left copies c₁ = d_B and right copies c₂ = d_A give left degree d_A·d₁d₂
    let r = expand_and_subsample(
        &cfg.input,
        d_b,
        d_a,
        (d_a, d_b),
        (delta, 0.5 - delta, 0.5),
        cfg.override_lambda,
        cfg.force_p,
        cfg.seed,
    )?;
    let degree_ok = validate_degrees(&r.output, DegreeMode::BoundedBipartite { left: d_a, right: d_b }).0;
    let completeness = completeness(&r, delta, 1.0 - 0.02 * cfg.eps)?;
    let mut stages = vec![
        StageRecord::instance("input", &r.input),
        StageRecord::instance("copy_expanded", &r.expanded),
        StageRecord::instance("subsampled", &r.output),
    ];
    let (mut fglss_edges, mut fglss_hash, mut fglss_vertices) = (None, None, None);
    let (mut claw_at_k, mut claw_at_degree_sum, mut indep) = (None, None, None);
    if r.output.edge_count() > 0 {
        let g = fglss(&r.output)?.graph;
        let hash = sha256_hex(g.to_json().as_bytes());
        stages.push(StageRecord {
            edges: g.edge_count(),
            hash: hash.clone(),
            stage: "fglss".into(),
            vertices: g.num_vertices(),
        });
        fglss_edges = Some(g.edge_count());
        fglss_vertices = Some(g.num_vertices());
        fglss_hash = Some(hash);
        claw_at_k = Some(claw_check(&g, cfg.k, cfg.graph_cap)?);
        claw_at_degree_sum = Some(claw_check(&g, d_a + d_b, cfg.graph_cap)?);
        if g.num_vertices() <= cfg.graph_cap {
            if let Some((_, satisfied)) = exact_value(&r.output, cfg.exact_cap)? {
                let size = indep_exact(&g, &SolverConfig { cap: cfg.graph_cap })?.size;
                indep = Some(IndepCheck {
                    equal: size == satisfied,
                    indep: size,
                    val_times_edges: satisfied,
                });
            }
        }
    }
    Ok(NpReport {
        balance,
        claw_at_degree_sum,
        claw_at_k,
        completeness,
        config: cfg.clone(),
        degree_ok,
        degree_sum_within_k: d_a + d_b <= cfg.k,
        fglss_edges,
        fglss_hash,
        fglss_vertices,
        indep,
        params: r.params,
        reduction: r.reduction,
        stages,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxReport {
    pub assignment: Assignment,
    pub config: ApproxConfig,
    pub edges: usize,
    pub exact_satisfied: Option<usize>,
    /// `approx / optimum ≥ 2/(d+1)`.
    pub guarantee_holds: Option<bool>,
    pub hash: String,
    /// Approximate over optimal satisfied count; 1 when the optimum is 0.
    pub ratio: Option<f64>,
    pub satisfied: usize,
    pub support: usize,
    pub value: f64,
    pub weighted_forest_count: f64,
}

pub fn pipeline_approx(cfg: &ApproxConfig) -> Result<ApproxReport> {
    let (inst, _) = cfg.input.resolve()?;
    let out = approx_solve(&inst, cfg.d)?;
    let exact_satisfied = exact_value(&inst, cfg.exact_cap)?.map(|v| v.1);
    let ratio = exact_satisfied.map(|opt| if opt == 0 { 1.0 } else { out.satisfied as f64 / opt as f64 });
    let guarantee_holds =
        exact_satisfied.map(|opt| (cfg.d + 1) as f64 * out.satisfied as f64 >= 2.0 * opt as f64);
    Ok(ApproxReport {
        assignment: out.assignment,
        config: cfg.clone(),
        edges: inst.edge_count(),
        exact_satisfied,
        guarantee_holds,
        hash: inst.content_hash(),
        ratio,
        satisfied: out.satisfied,
        support: out.certificate.parts.len(),
        value: out.value,
        weighted_forest_count: out.weighted_forest_count,
    })
}
