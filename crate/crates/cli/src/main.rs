use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cspclaw_core::approx::approx_solve;
use cspclaw_core::csp::{Assignment, CspInstance};
use cspclaw_core::dictator::{
    build_gadget, test_accept_prob, AcceptMode, TestFunction, DEFAULT_C_ACCEPT, DEFAULT_EXACT_ACCEPT_CAP,
};
use cspclaw_core::graph::{find_claw, indep_exact, SimpleGraph, SolverConfig, DEFAULT_EXACT_CAP};
use cspclaw_core::oracles::{
    binomial_tail_exact, brute_cval, brute_val, chernoff_bound, clip_excess, monte_carlo_tail_split, ClipMode,
    DEFAULT_ENUMERATION_CAP,
};
use cspclaw_core::pipeline::{experiment_sweep, run_pipeline, InputSpec, PipelineConfig, SweepConfig};
use cspclaw_core::reductions::{
    bipartite_double, copy_expand, fglss, label_extended, subsample_params, subsample_reduce, ParamInputs,
};
use cspclaw_core::{Error, Result};

#[derive(Parser)]
#[command(name = "cspclaw", version, about = "Bounded-degree Max 2-CSP and claw-free independent set toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Input JSON file; stdin when absent or `-`.
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Output file; stdout when absent or `-`.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance from a generator spec (`{"kind": "planted" | "random", ...}`).
    Gen {
        #[command(flatten)]
        io: Io,
        /// Replaces the spec's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Copy each left vertex c1 times and each right vertex c2 times.
    ReduceCopy {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        c1: usize,
        #[arg(long)]
        c2: usize,
    },
    /// Bipartite double cover.
    ReduceDouble {
        #[command(flatten)]
        io: Io,
    },
    /// Degree reduction by edge subsampling.
    ReduceSubsample(SubsampleArgs),
    /// FGLSS graph of a bipartite instance.
    ReduceFglss {
        #[command(flatten)]
        io: Io,
    },
    /// Label-extended graph of a d-bounded instance.
    ReduceLabelExtended {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        d: usize,
    },
    /// Forest-decomposition approximation for a d-bounded instance.
    Approx {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        d: usize,
    },
    /// Exact optimum by enumeration (instances) or branch and bound (graphs).
    SolveExact {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value = "val")]
        objective: Objective,
        /// Enumeration cap (assignments for val/cval, vertices for indep).
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Search a graph for an induced k-claw.
    CheckClaw {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        cap: usize,
    },
    /// Binomial tail and clipped-excess evaluators.
    Bounds(BoundsArgs),
    /// Expander dictatorship test on a test function.
    DictTest(DictArgs),
    /// Run one pipeline from a JSON config.
    Pipeline {
        #[command(flatten)]
        io: Io,
    },
    /// Run a pipeline over a parameter grid and seed list.
    Sweep {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    Val,
    Cval,
    Indep,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SubsampleArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long)]
    d_a: usize,
    #[arg(long)]
    d_b: usize,
    /// Degree blow-up factor of the input.
    #[arg(long)]
    c: usize,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    nu: f64,
    #[arg(long)]
    override_lambda: Option<f64>,
    #[arg(long)]
    force_p: Option<f64>,
    #[arg(long)]
    seed: u64,
    /// Reference assignment JSON (array of labels) for the planted event.
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_enum)]
    kind: BoundKind,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    m: u64,
    /// Threshold for tail kinds.
    #[arg(long)]
    theta: Option<f64>,
    /// Clip level for clip kinds.
    #[arg(long)]
    tau: Option<u64>,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum BoundKind {
    Chernoff,
    TailExact,
    TailMonteCarlo,
    ClipBound,
    ClipExact,
    ClipMonteCarlo,
}

#[derive(Args)]
struct DictArgs {
    #[arg(long = "R")]
    r: usize,
    #[arg(long)]
    t: usize,
    #[arg(long = "L")]
    l: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `dictator:i`, `constant:c`, `random`, `balanced` or `file:PATH` (JSON label table).
    #[arg(long, default_value = "dictator:0")]
    function: String,
    /// Monte Carlo trials; exact enumeration when absent.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_EXACT_ACCEPT_CAP as u64)]
    cap: u64,
    #[arg(long, default_value_t = DEFAULT_C_ACCEPT)]
    c_accept: f64,
    #[arg(long, default_value_t = 200)]
    max_retries: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn read_input(path: &Option<PathBuf>) -> Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    let res = match path {
        Some(p) if p.as_os_str() != "-" => fs::write(p, text),
        _ => io::stdout().write_all(text.as_bytes()),
    };
    res.map_err(|e| Error::Parse(format!("write failed: {e}")))
}

fn emit(path: &Option<PathBuf>, v: &Value) -> Result<()> {
    write_output(path, &serde_json::to_string_pretty(v)?)
}

fn instance_value(inst: &CspInstance) -> Result<Value> {
    Ok(serde_json::from_str(&inst.to_json())?)
}

fn parse_function(spec: &str, r: usize, l: usize, seed: u64) -> Result<TestFunction> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let num = |what: &str| {
        arg.parse::<usize>()
            .map_err(|_| Error::Parse(format!("{what} needs an integer argument, got {arg:?}")))
    };
    match kind {
        "dictator" => TestFunction::dictator(r, l, num("dictator")?),
        "constant" => TestFunction::constant(r, l, num("constant")?),
        "random" => TestFunction::random(r, l, seed),
        "balanced" => TestFunction::random_balanced(r, l, seed),
        "file" => {
            let table: Vec<usize> = serde_json::from_str(&read_input(&Some(PathBuf::from(arg)))?)?;
            TestFunction::from_table(r, l, table)
        }
        _ => Err(Error::Parse(format!("unknown function {spec:?}"))),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { io, seed } => {
            let mut spec: Value = serde_json::from_str(&read_input(&io.input)?)?;
            if let Some(s) = seed {
                spec["seed"] = json!(s);
            }
            let spec: InputSpec = serde_json::from_value(spec)?;
            let (inst, reference) = spec.resolve()?;
            emit(&io.output, &json!({ "instance": instance_value(&inst)?, "reference": reference }))
        }
        Command::ReduceCopy { io, c1, c2 } => {
            let inst = CspInstance::from_json(&read_input(&io.input)?)?;
            emit(&io.output, &serde_json::to_value(copy_expand(&inst, c1, c2)?)?)
        }
        Command::ReduceDouble { io } => {
            let inst = CspInstance::from_json(&read_input(&io.input)?)?;
            emit(&io.output, &serde_json::to_value(bipartite_double(&inst)?)?)
        }
        Command::ReduceSubsample(a) => {
            let inst = CspInstance::from_json(&read_input(&a.io.input)?)?;
            let a_size = inst.bipartition().map(|b| b.left.len()).unwrap_or(0);
            let mut params = subsample_params(&ParamInputs {
                delta: a.delta,
                nu: a.nu,
                t: a.t,
                c: a.c,
                d_a: a.d_a,
                d_b: a.d_b,
                a_size,
                override_lambda: a.override_lambda,
            })?;
            if let Some(p) = a.force_p {
                params = params.with_forced_p(p)?;
            }
            let reference: Option<Assignment> = match &a.reference {
                Some(p) => Some(serde_json::from_str(&read_input(&Some(p.clone()))?)?),
                None => None,
            };
            let (out, report) = subsample_reduce(&inst, &params, a.seed, reference.as_ref())?;
            emit(
                &a.io.output,
                &json!({ "instance": instance_value(&out)?, "params": params, "report": report }),
            )
        }
        Command::ReduceFglss { io } => {
            let inst = CspInstance::from_json(&read_input(&io.input)?)?;
            emit(&io.output, &serde_json::to_value(fglss(&inst)?)?)
        }
        Command::ReduceLabelExtended { io, d } => {
            let inst = CspInstance::from_json(&read_input(&io.input)?)?;
            emit(&io.output, &serde_json::to_value(label_extended(&inst, d)?)?)
        }
        Command::Approx { io, d } => {
            let inst = CspInstance::from_json(&read_input(&io.input)?)?;
            emit(&io.output, &serde_json::to_value(approx_solve(&inst, d)?)?)
        }
        Command::SolveExact { io, objective, cap } => {
            let text = read_input(&io.input)?;
            let record = match objective {
                Objective::Val => {
                    let cap = cap.map_or(DEFAULT_ENUMERATION_CAP, u128::from);
                    let r = brute_val(&CspInstance::from_json(&text)?, cap)?;
                    json!({ "inputs": { "objective": "val", "cap": cap as u64 }, "value": r.value,
                            "satisfied": r.satisfied, "witness": r.witness })
                }
                Objective::Cval => {
                    let cap = cap.map_or(DEFAULT_ENUMERATION_CAP, u128::from);
                    let r = brute_cval(&CspInstance::from_json(&text)?, cap)?;
                    json!({ "inputs": { "objective": "cval", "cap": cap as u64 }, "value": r.size, "witness": r.witness })
                }
                Objective::Indep => {
                    let cap = cap.map_or(DEFAULT_EXACT_CAP, |c| c as usize);
                    let r = indep_exact(&SimpleGraph::from_json(&text)?, &SolverConfig { cap })?;
                    json!({ "inputs": { "objective": "indep", "cap": cap }, "value": r.size, "witness": r.vertices })
                }
            };
            emit(&io.output, &record)
        }
        Command::CheckClaw { io, k, cap } => {
            let g = SimpleGraph::from_json(&read_input(&io.input)?)?;
            let claw = find_claw(&g, k, &SolverConfig { cap })?;
            emit(
                &io.output,
                &json!({ "inputs": { "k": k }, "value": claw.is_none(), "witness": claw }),
            )
        }
        Command::Bounds(b) => {
            let theta = || b.theta.ok_or_else(|| Error::Parameter("--theta is required".into()));
            let tau = || b.tau.ok_or_else(|| Error::Parameter("--tau is required".into()));
            let mc = ClipMode::MonteCarlo { trials: b.trials, seed: b.seed };
            let kind = b.kind.to_possible_value().expect("no skipped variants");
            let mut record = json!({ "inputs": { "kind": kind.get_name(), "mu": b.mu, "m": b.m } });
            let value = match b.kind {
                BoundKind::Chernoff => chernoff_bound(b.mu, b.m, theta()?)?,
                BoundKind::TailExact => binomial_tail_exact(b.mu, b.m, theta()?)?,
                BoundKind::TailMonteCarlo => {
                    let est = monte_carlo_tail_split(b.mu, b.m, theta()?, b.trials, b.seed, b.workers)?;
                    record["std_error"] = json!(est.std_error);
                    est.estimate
                }
                BoundKind::ClipBound => clip_excess(b.mu, b.m, tau()?, ClipMode::Bound)?,
                BoundKind::ClipExact => clip_excess(b.mu, b.m, tau()?, ClipMode::Exact)?,
                BoundKind::ClipMonteCarlo => clip_excess(b.mu, b.m, tau()?, mc)?,
            };
            for (key, v) in [("theta", b.theta.map(|x| json!(x))), ("tau", b.tau.map(|x| json!(x)))] {
                if let Some(v) = v {
                    record["inputs"][key] = v;
                }
            }
            if matches!(b.kind, BoundKind::TailMonteCarlo | BoundKind::ClipMonteCarlo) {
                record["inputs"]["trials"] = json!(b.trials);
                record["inputs"]["seed"] = json!(b.seed);
            }
            record["value"] = json!(value);
            emit(&b.output, &record)
        }
        Command::DictTest(d) => {
            let gadget = build_gadget(d.r, d.t, d.seed, d.c_accept, d.max_retries)?;
            let f = parse_function(&d.function, d.r, d.l, d.seed)?;
            let mode = match d.trials {
                Some(trials) => AcceptMode::MonteCarlo { trials, seed: d.seed },
                None => AcceptMode::Exact { cap: d.cap.into() },
            };
            let res = test_accept_prob(&gadget, &f, mode)?;
            emit(
                &d.output,
                &json!({
                    "inputs": { "R": d.r, "t": d.t, "L": d.l, "seed": d.seed, "function": d.function },
                    "gadget": gadget,
                    "balanced": f.is_balanced(),
                    "accepted": res.accepted as u64,
                    "total": res.total as u64,
                    "value": res.probability,
                }),
            )
        }
        Command::Pipeline { io } => {
            let cfg = PipelineConfig::from_json(&read_input(&io.input)?)?;
            write_output(&io.output, &run_pipeline(&cfg)?.to_json())
        }
        Command::Sweep { io, format } => {
            let cfg: SweepConfig = serde_json::from_str(&read_input(&io.input)?)?;
            let summary = experiment_sweep(&cfg)?;
            match format {
                Format::Json => write_output(&io.output, &serde_json::to_string_pretty(&summary)?),
                Format::Csv => write_output(&io.output, &summary.to_csv()?),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
