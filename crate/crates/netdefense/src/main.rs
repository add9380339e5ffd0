use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use netdefense::formats::{
    self, format_edge_list, format_worths, load_edge_list, load_worths, write_losses,
};
use netdefense::parallel::{self, with_threads};
use netdefense::report::{BaselineReport, PolicyMatrix, SolveReport, Timings};
use netdefense::scenario::{load_scenario, GeneratorSpec, LoadedScenario};
use netdefense::sweep::{run_sweep, BaseGraph, GraphFamily, SweepKind, SweepSpec};
use netdefense_core::baselines::{degree_heuristic_policy, independence_policy};
use netdefense_core::game::evaluate_policy;
use netdefense_core::generators::{assign_worths, WorthAssignment};
use netdefense_core::tree::tree_expected_losses;
use netdefense_core::{
    Budget, CascadeModel, ExpectedLossVector, LpBackend, Scenario, SolveOptions,
};

#[derive(Parser, Debug)]
#[command(
    name = "netdefense",
    version,
    about = "Optimal randomized defense of interdependent targets"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Master seed for generators and sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo samples per loss estimate.
    #[arg(long, global = true, default_value_t = 10_000)]
    samples: u64,
    /// Seeds per sweep point.
    #[arg(long, global = true, default_value_t = 100)]
    replications: usize,
    /// Output directory (stdout when omitted, except for sweeps).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random graph as an edge list (and worth file).
    Gen(GenArgs),
    /// Expected cascade loss of an attack on every target.
    Losses(InputArgs),
    /// Solve a scenario and print the policy document.
    Solve(SolveArgs),
    /// Evaluate a comparison policy on a scenario.
    Baseline(BaselineArgs),
    /// Run a parameter sweep and write per-seed and summary tables.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    Er,
    Pa,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    n: usize,
    /// ER pair probability.
    #[arg(long, conflicts_with = "avg_degree")]
    p: Option<f64>,
    /// ER expected degree.
    #[arg(long)]
    avg_degree: Option<f64>,
    /// PA edges per new node.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// PA degree exponent.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 0.5)]
    cascade_prob: f64,
    /// Directed ER edges.
    #[arg(long)]
    directed: bool,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Scenario document (JSON).
    #[arg(long, conflicts_with_all = ["graph", "worths"])]
    scenario: Option<PathBuf>,
    /// Edge-list file; worths default to 1.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, requires = "graph")]
    worths: Option<PathBuf>,
    /// Use the exact tree recursion instead of sampling.
    #[arg(long)]
    exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Backend {
    Auto,
    Simplex,
    Structured,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    exact: bool,
    /// Total expected-cost budget (overrides the scenario).
    #[arg(long, conflicts_with = "budget_per_target")]
    budget_total: Option<f64>,
    #[arg(long)]
    budget_per_target: Option<f64>,
    /// Solve all n LPs even when the attack prior is zero.
    #[arg(long)]
    no_shortcut: bool,
    #[arg(long, value_enum, default_value_t = Backend::Auto)]
    backend: Backend,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BaselineMethod {
    Independence,
    Degree,
}

#[derive(Args, Debug)]
struct BaselineArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_enum)]
    method: BaselineMethod,
    /// Degree-heuristic budget; defaults to the optimal policy's spend.
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    exact: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    kind: SweepKind,
    /// Comma-separated parameter values (defaults depend on the kind).
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    /// Fixed graph from a scenario document instead of generated graphs.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Model::Pa)]
    family: Model,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// ER pair probability (default: average degree 2).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 0.5)]
    cascade_prob: f64,
    /// Marginal defense cost when c is not swept.
    #[arg(long, default_value_t = 0.04)]
    cost: f64,
    /// Attack prior r (the true prior for the failure sweep).
    #[arg(long)]
    attack_prob: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    reference_samples: u64,
    /// Write zeros in the timing columns so files are byte-reproducible.
    #[arg(long)]
    no_timings: bool,
}

enum Failure {
    Usage(anyhow::Error),
    Solver(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.into())
    }
}

fn solver_failure(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Solver(e.into())
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.global.threads;
    match with_threads(threads, || run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("solver failure: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    let g = &cli.global;
    match &cli.command {
        Command::Gen(a) => gen(g, a),
        Command::Losses(a) => losses_cmd(g, a),
        Command::Solve(a) => solve_cmd(g, a),
        Command::Baseline(a) => baseline_cmd(g, a),
        Command::Sweep(a) => sweep_cmd(g, a),
    }
}

/// Writes `text` to `<out>/<name>` or stdout.
fn emit(g: &Global, name: &str, text: &str) -> CliResult {
    match &g.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(name);
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn gen(g: &Global, a: &GenArgs) -> CliResult {
    let spec = match a.model {
        Model::Er => GeneratorSpec::ErdosRenyi {
            n: a.n,
            p: a.p,
            avg_degree: if a.p.is_none() {
                Some(a.avg_degree.unwrap_or(2.0))
            } else {
                None
            },
            cascade_prob: a.cascade_prob,
            directed: a.directed,
            seed: g.seed,
        },
        Model::Pa => {
            if a.directed {
                return Err(anyhow!("preferential attachment graphs are undirected").into());
            }
            GeneratorSpec::PreferentialAttachment {
                n: a.n,
                m: a.m,
                mu: a.mu,
                cascade_prob: a.cascade_prob,
                seed: g.seed,
            }
        }
    };
    let graph = spec.generate()?;
    let graph = assign_worths(graph, &WorthAssignment::Uniform01 { seed: g.seed })?;
    emit(g, "graph.txt", &format_edge_list(&graph))?;
    if g.out.is_some() {
        emit(g, "worths.txt", &format_worths(&graph))?;
    }
    Ok(())
}

fn load_input(a: &InputArgs) -> CliResult<CascadeModel> {
    if let Some(path) = &a.scenario {
        return Ok(load_scenario(path)?.model);
    }
    let Some(path) = &a.graph else {
        return Err(anyhow!("give --scenario or --graph").into());
    };
    let graph = load_edge_list(path)?;
    let mode = match &a.worths {
        Some(wp) => {
            let w = load_worths(wp, graph.n())?;
            WorthAssignment::Explicit {
                defender: w.defender,
                attacker: w.attacker,
            }
        }
        None => WorthAssignment::Constant(1.0),
    };
    Ok(CascadeModel::Sparse(assign_worths(graph, &mode)?))
}

fn compute_losses(model: &CascadeModel, exact: bool, g: &Global) -> CliResult<ExpectedLossVector> {
    if exact {
        Ok(tree_expected_losses(model)?)
    } else {
        Ok(parallel::estimate_component_losses(
            model, g.samples, g.seed,
        )?)
    }
}

fn losses_cmd(g: &Global, a: &InputArgs) -> CliResult {
    let model = load_input(a)?;
    let losses = compute_losses(&model, a.exact, g)?;
    match g.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_losses(&losses, &mut buf).map_err(|e: formats::FormatError| anyhow!(e))?;
            emit(
                g,
                "losses.csv",
                &String::from_utf8(buf).expect("csv output is UTF-8"),
            )
        }
        Format::Json => emit(
            g,
            "losses.json",
            &(serde_json::to_string_pretty(&losses)? + "\n"),
        ),
    }
}

fn backend(b: Backend) -> LpBackend {
    match b {
        Backend::Auto => LpBackend::Auto,
        Backend::Simplex => LpBackend::Simplex,
        Backend::Structured => LpBackend::Structured,
    }
}

fn solve_cmd(g: &Global, a: &SolveArgs) -> CliResult {
    let start = Instant::now();
    let loaded: LoadedScenario = load_scenario(&a.scenario)?;
    let load_ms = ms(start);

    let t = Instant::now();
    let losses = compute_losses(&loaded.model, a.exact, g)?;
    let sample_ms = ms(t);

    let budget = match (a.budget_total, a.budget_per_target) {
        (Some(b), _) => Some(Budget::Total(b)),
        (None, Some(b)) => Some(Budget::PerTarget(b)),
        (None, None) => loaded.budget,
    };
    let options = SolveOptions {
        budget,
        short_circuit_zero_attack: !a.no_shortcut,
        backend: backend(a.backend),
    };
    let t = Instant::now();
    let inst = loaded.scenario.instance(&losses)?;
    let result = parallel::solve_multiple_lp(&inst, &options).map_err(solver_failure)?;
    let evaluation = evaluate_policy(&inst, &result.policy)?;
    let solve_ms = ms(t);

    let timings = Timings {
        load_ms,
        sample_ms,
        solve_ms,
        total_ms: ms(start),
    };
    eprintln!(
        "n = {}, samples = {}, load {:.1} ms, sampling {:.1} ms, LPs {:.1} ms",
        inst.n(),
        losses.samples,
        load_ms,
        sample_ms,
        solve_ms
    );
    let report = SolveReport::new(
        &result,
        &loaded.scenario.configs,
        evaluation,
        losses.samples,
        timings,
    );
    emit(
        g,
        "solve.json",
        &(serde_json::to_string_pretty(&report)? + "\n"),
    )
}

fn baseline_cmd(g: &Global, a: &BaselineArgs) -> CliResult {
    let loaded = load_scenario(&a.scenario)?;
    let Scenario {
        graph,
        configs,
        priors,
    } = &loaded.scenario;
    let losses = compute_losses(&loaded.model, a.exact, g)?;
    let inst = loaded.scenario.instance(&losses)?;
    let options = SolveOptions::with_budget(loaded.budget);
    let optimal = parallel::solve_multiple_lp(&inst, &options).map_err(solver_failure)?;
    let optimal_eval = evaluate_policy(&inst, &optimal.policy)?;
    let (name, policy) = match a.method {
        BaselineMethod::Independence => (
            "independence",
            independence_policy(graph, configs, priors, &options).map_err(solver_failure)?,
        ),
        BaselineMethod::Degree => {
            let budget = a.budget.unwrap_or(optimal_eval.expected_cost);
            (
                "degree_heuristic",
                degree_heuristic_policy(graph, configs, budget)?,
            )
        }
    };
    let report = BaselineReport {
        method: name.into(),
        policy: PolicyMatrix::new(&policy, configs),
        evaluation: evaluate_policy(&inst, &policy)?,
        optimal_utility: optimal_eval.defender_utility,
        samples: losses.samples,
    };
    emit(
        g,
        &format!("baseline_{name}.json"),
        &(serde_json::to_string_pretty(&report)? + "\n"),
    )
}

fn sweep_cmd(g: &Global, a: &SweepArgs) -> CliResult {
    let mut spec = SweepSpec::new(a.kind);
    if let Some(v) = &a.values {
        spec.values = v.clone();
    }
    spec.replications = g.replications;
    spec.master_seed = g.seed;
    spec.samples = g.samples;
    spec.n = a.n;
    spec.cascade_prob = a.cascade_prob;
    spec.cost = a.cost;
    spec.reference_samples = a.reference_samples;
    spec.record_timings = !a.no_timings;
    if let Some(r) = a.attack_prob {
        spec.attack_prob = r;
    }
    spec.base = match (&a.scenario, a.family) {
        (Some(path), _) => BaseGraph::Fixed(load_scenario(path)?.scenario.graph),
        (None, Model::Pa) => {
            BaseGraph::Generated(GraphFamily::PreferentialAttachment { m: a.m, mu: a.mu })
        }
        (None, Model::Er) => BaseGraph::Generated(GraphFamily::ErdosRenyi {
            p: a.p.unwrap_or(if a.n > 1 {
                (2.0 / (a.n - 1) as f64).min(1.0)
            } else {
                0.0
            }),
        }),
    };
    let out_dir = g.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    if let Some(path) = &a.scenario {
        guard_output_dir(&out_dir, path)?;
    }
    let stem = match a.kind {
        SweepKind::Noise => format!("noise_p{}", a.cascade_prob),
        k => k.name().to_string(),
    };
    let output = run_sweep(&spec)?;
    let files = output.write_files(&out_dir, &stem, g.format == Format::Json)?;
    for f in &files {
        eprintln!("wrote {}", f.display());
    }
    let failed: Vec<_> = output.failures().collect();
    if let Some(first) = failed.first() {
        return Err(solver_failure(anyhow!(
            "{} sweep rows failed; first at param {} seed {}: {}",
            failed.len(),
            first.param,
            first.seed,
            first.failed.as_deref().unwrap_or("")
        )));
    }
    Ok(())
}

/// Results never land next to the scenario they were computed from.
fn guard_output_dir(out: &Path, scenario: &Path) -> CliResult {
    let scen_dir = scenario
        .parent()
        .map(|p| {
            if p.as_os_str().is_empty() {
                Path::new(".")
            } else {
                p
            }
        })
        .unwrap_or(Path::new("."));
    if let (Ok(a), Ok(b)) = (out.canonicalize(), scen_dir.canonicalize()) {
        if a == b {
            return Err(anyhow!(
                "output directory {} holds the scenario file; choose a separate --out",
                out.display()
            )
            .into());
        }
    }
    Ok(())
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}
