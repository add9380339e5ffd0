//! Parameter sweeps over generated or fixed graphs.
//!
//! Each replication `i` uses seed `master_seed + i`; graph, worth and
//! sampling streams are derived from it, so every row can be regenerated
//! from `(spec, seed, parameter value)` alone. Rows come back in canonical
//! `(parameter, method, replication)` order whatever the thread count.

use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use netdefense_core::baselines::{degree_heuristic_policy, independence_policy};
use netdefense_core::game::evaluate_policy;
use netdefense_core::generators::{
    assign_worths, ErdosRenyi, PreferentialAttachment, WorthAssignment,
};
use netdefense_core::graph::apply_edge_noise;
use netdefense_core::rng::derive_seed;
use netdefense_core::{
    Budget, CascadeModel, ConfigurationSet, DefensePolicy, DependencyGraph, ExpectedLossVector,
    GameInstance, GamePriors, SolveOptions,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::parallel;

const GRAPH_STREAM: u64 = 1;
const WORTH_STREAM: u64 = 2;
const SAMPLE_STREAM: u64 = 3;
const REFERENCE_STREAM: u64 = 4;
const REFERENCE_GRAPH_STREAM: u64 = 5;

/// Largest graph a noise sweep will build a dense model for.
pub const MAX_NOISE_N: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Marginal defense cost `c`.
    Cost,
    /// Edge-noise level `epsilon`.
    Noise,
    /// Expected degree of Erdos-Renyi graphs.
    Density,
    /// Preferential-attachment exponent.
    Mu,
    /// Attack-only policy vs the optimum under mostly random failures.
    Failure,
    /// Two-option menu vs menus with a cheaper partial option.
    Configs,
    /// Sample count used to build the solver's loss vector.
    Samples,
    /// Total expected-cost budget.
    Budget,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Cost => "cost",
            SweepKind::Noise => "noise",
            SweepKind::Density => "density",
            SweepKind::Mu => "mu",
            SweepKind::Failure => "failure",
            SweepKind::Configs => "configs",
            SweepKind::Samples => "samples",
            SweepKind::Budget => "budget",
        }
    }

    /// Values swept when none are given.
    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepKind::Cost | SweepKind::Failure | SweepKind::Configs => default_cost_grid(),
            SweepKind::Noise => vec![0.0, 0.001, 0.005, 0.01, 0.02, 0.05],
            SweepKind::Density => vec![0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0],
            SweepKind::Mu => vec![0.0, 0.5, 1.0, 1.5, 2.0, 3.0],
            SweepKind::Samples => vec![0.0, 10.0, 100.0, 1000.0, 10000.0],
            SweepKind::Budget => vec![0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0],
        }
    }

    fn methods(self) -> &'static [Method] {
        use Method::*;
        match self {
            SweepKind::Cost => &[Optimal, Independence, DegreeHeuristic],
            SweepKind::Noise | SweepKind::Density | SweepKind::Samples => &[Optimal],
            SweepKind::Mu => &[Optimal, ErReference],
            SweepKind::Failure => &[Optimal, AttackOnly],
            SweepKind::Configs => &[TwoConfig, HalfEighth, QuarterEighth],
            SweepKind::Budget => &[Optimal, DegreeHeuristic],
        }
    }
}

/// `c = 0` followed by 19 log-spaced points on `[0.001, 30]`.
pub fn default_cost_grid() -> Vec<f64> {
    let (lo, hi, k) = (0.001f64, 30.0f64, 19);
    let mut v = vec![0.0];
    v.extend((0..k).map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64)));
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Optimal,
    Independence,
    DegreeHeuristic,
    AttackOnly,
    TwoConfig,
    HalfEighth,
    QuarterEighth,
    ErReference,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Optimal => "optimal",
            Method::Independence => "independence",
            Method::DegreeHeuristic => "degree_heuristic",
            Method::AttackOnly => "attack_only",
            Method::TwoConfig => "two_config",
            Method::HalfEighth => "half_eighth",
            Method::QuarterEighth => "quarter_eighth",
            Method::ErReference => "er_reference",
        }
    }
}

/// Random graph family for generated sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphFamily {
    /// Edge probability `p` per pair.
    ErdosRenyi {
        p: f64,
    },
    PreferentialAttachment {
        m: usize,
        mu: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaseGraph {
    Generated(GraphFamily),
    /// One graph (with worths) shared by all replications; only sampling
    /// seeds vary.
    Fixed(DependencyGraph),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub values: Vec<f64>,
    pub replications: usize,
    pub master_seed: u64,
    pub n: usize,
    pub base: BaseGraph,
    pub cascade_prob: f64,
    pub samples: u64,
    /// Marginal cost when `c` is not the swept parameter.
    pub cost: f64,
    /// Attack prior `r`. For the failure sweep this is the true prior.
    pub attack_prob: f64,
    /// Samples behind the loss vector that scores the samples sweep.
    pub reference_samples: u64,
    /// Record wall-clock columns; turn off for byte-reproducible files.
    pub record_timings: bool,
}

impl SweepSpec {
    /// Defaults: 100 targets, PA with `m = 1` (average degree 2), cascade
    /// probability 0.5, 10,000 samples, 100 replications, `c = 0.04`, `r = 1`.
    pub fn new(kind: SweepKind) -> Self {
        SweepSpec {
            kind,
            values: kind.default_values(),
            replications: 100,
            master_seed: 0,
            n: 100,
            base: BaseGraph::Generated(GraphFamily::PreferentialAttachment { m: 1, mu: 1.0 }),
            cascade_prob: 0.5,
            samples: 10_000,
            cost: 0.04,
            attack_prob: if kind == SweepKind::Failure { 0.0 } else { 1.0 },
            reference_samples: 100_000,
            record_timings: true,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |m: String| Err(SweepError::Invalid(m));
        if self.values.is_empty() {
            return bad("sweep needs at least one value".into());
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return bad(format!("sweep value {v} is not finite"));
        }
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.samples == 0 && self.kind != SweepKind::Samples {
            return bad("samples must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.attack_prob) {
            return bad(format!(
                "attack probability {} outside [0, 1]",
                self.attack_prob
            ));
        }
        let fixed = matches!(self.base, BaseGraph::Fixed(_));
        match self.kind {
            SweepKind::Density | SweepKind::Mu if fixed => {
                return bad(format!(
                    "the {} sweep generates its own graphs",
                    self.kind.name()
                ))
            }
            SweepKind::Noise if self.graph_n() > MAX_NOISE_N => {
                return bad(format!(
                    "noise sweeps build dense models; n must be <= {MAX_NOISE_N}"
                ))
            }
            SweepKind::Samples => {
                if let Some(k) = self.values.iter().find(|k| **k < 0.0 || k.fract() != 0.0) {
                    return bad(format!("sample count {k} is not a nonnegative integer"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn graph_n(&self) -> usize {
        match &self.base {
            BaseGraph::Fixed(g) => g.n(),
            BaseGraph::Generated(_) => self.n,
        }
    }

    /// Seed of replication `rep`.
    pub fn replication_seed(&self, rep: usize) -> u64 {
        self.master_seed.wrapping_add(rep as u64)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    Invalid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One `(parameter, method, seed)` result. Failed replications keep their
/// place with `failed = true` and NaN metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub method: Method,
    pub seed: u64,
    pub exp_loss: f64,
    pub exp_cost: f64,
    pub neg_utility: f64,
    pub solve_ms: f64,
    pub sample_ms: f64,
    #[serde(skip)]
    pub failed: Option<String>,
    #[serde(skip)]
    param_index: usize,
    #[serde(skip)]
    rep: usize,
}

impl SweepRow {
    fn key(&self) -> (usize, Method, usize) {
        (self.param_index, self.method, self.rep)
    }
}

#[derive(Debug, Clone, Serialize)]
struct CsvRow<'a> {
    param: f64,
    method: &'a str,
    seed: u64,
    exp_loss: f64,
    exp_cost: f64,
    neg_utility: f64,
    solve_ms: f64,
    sample_ms: f64,
}

/// Mean and standard error over the successful replications of one
/// `(parameter, method)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub param: f64,
    pub method: String,
    pub replications: usize,
    pub failures: usize,
    pub exp_loss_mean: f64,
    pub exp_loss_stderr: f64,
    pub exp_cost_mean: f64,
    pub exp_cost_stderr: f64,
    pub neg_utility_mean: f64,
    pub neg_utility_stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub kind: SweepKind,
    pub rows: Vec<SweepRow>,
}

impl SweepOutput {
    pub fn failures(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.failed.is_some())
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut out: Vec<SummaryRow> = Vec::new();
        let mut i = 0;
        while i < self.rows.len() {
            let first = &self.rows[i];
            let j = i + self.rows[i..]
                .iter()
                .take_while(|r| r.param_index == first.param_index && r.method == first.method)
                .count();
            let cell: Vec<&SweepRow> = self.rows[i..j]
                .iter()
                .filter(|r| r.failed.is_none())
                .collect();
            let stat = |f: fn(&SweepRow) -> f64| mean_stderr(cell.iter().map(|r| f(r)));
            let (lm, ls) = stat(|r| r.exp_loss);
            let (cm, cs) = stat(|r| r.exp_cost);
            let (um, us) = stat(|r| r.neg_utility);
            out.push(SummaryRow {
                param: first.param,
                method: first.method.label().into(),
                replications: cell.len(),
                failures: j - i - cell.len(),
                exp_loss_mean: lm,
                exp_loss_stderr: ls,
                exp_cost_mean: cm,
                exp_cost_stderr: cs,
                neg_utility_mean: um,
                neg_utility_stderr: us,
            });
            i = j;
        }
        out
    }

    /// Rows of `method`, one vector per parameter value in sweep order.
    pub fn by_param(&self, method: Method) -> Vec<Vec<&SweepRow>> {
        let mut out: Vec<Vec<&SweepRow>> = Vec::new();
        for r in self.rows.iter().filter(|r| r.method == method) {
            if out.len() <= r.param_index {
                out.resize_with(r.param_index + 1, Vec::new);
            }
            out[r.param_index].push(r);
        }
        out
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), SweepError> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(CsvRow {
                param: r.param,
                method: r.method.label(),
                seed: r.seed,
                exp_loss: r.exp_loss,
                exp_cost: r.exp_cost,
                neg_utility: r.neg_utility,
                solve_ms: r.solve_ms,
                sample_ms: r.sample_ms,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_summary_csv<W: io::Write>(&self, out: W) -> Result<(), SweepError> {
        let mut w = csv::Writer::from_writer(out);
        for r in self.summary() {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `<stem>.csv` and `<stem>_summary.csv` (or `.json`) into `dir`
    /// and returns the paths.
    pub fn write_files(
        &self,
        dir: &Path,
        stem: &str,
        json: bool,
    ) -> Result<Vec<PathBuf>, SweepError> {
        std::fs::create_dir_all(dir)?;
        let ext = if json { "json" } else { "csv" };
        let rows_path = dir.join(format!("{stem}.{ext}"));
        let summary_path = dir.join(format!("{stem}_summary.{ext}"));
        if json {
            let rows: Vec<_> = self
                .rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "param": r.param, "method": r.method.label(), "seed": r.seed,
                        "exp_loss": r.exp_loss, "exp_cost": r.exp_cost, "neg_utility": r.neg_utility,
                        "solve_ms": r.solve_ms, "sample_ms": r.sample_ms, "error": r.failed,
                    })
                })
                .collect();
            std::fs::write(&rows_path, serde_json::to_string_pretty(&rows)?)?;
            std::fs::write(
                &summary_path,
                serde_json::to_string_pretty(&self.summary())?,
            )?;
        } else {
            self.write_csv(std::fs::File::create(&rows_path)?)?;
            self.write_summary_csv(std::fs::File::create(&summary_path)?)?;
        }
        Ok(vec![rows_path, summary_path])
    }
}

/// Sample mean and standard error of the mean; NaN for empty input and a
/// zero standard error for a single value.
pub fn mean_stderr(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() == 1 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Unit of parallel work: one replication over some parameter indices.
#[derive(Debug, Clone)]
struct Task {
    rep: usize,
    params: Vec<usize>,
}

type TaskResult = Result<Vec<SweepRow>, String>;

struct Ctx<'a> {
    spec: &'a SweepSpec,
    rep: usize,
    seed: u64,
}

struct Timed<T> {
    value: T,
    ms: f64,
}

impl Ctx<'_> {
    fn time<T>(&self, f: impl FnOnce() -> T) -> Timed<T> {
        let start = Instant::now();
        let value = f();
        let ms = if self.spec.record_timings {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        Timed { value, ms }
    }

    fn stream(&self, label: u64) -> u64 {
        derive_seed(self.seed, label)
    }

    fn with_worths(&self, g: DependencyGraph) -> Result<DependencyGraph, String> {
        assign_worths(
            g,
            &WorthAssignment::Uniform01 {
                seed: self.stream(WORTH_STREAM),
            },
        )
        .map_err(err)
    }

    fn generate(&self, family: GraphFamily, label: u64) -> Result<DependencyGraph, String> {
        let n = self.spec.n;
        let seed = self.stream(label);
        let g = match family {
            GraphFamily::ErdosRenyi { p } => {
                let mut er = ErdosRenyi::new(n, p);
                er.cascade_prob = self.spec.cascade_prob;
                er.generate(seed)
            }
            GraphFamily::PreferentialAttachment { m, mu } => {
                let mut pa = PreferentialAttachment::new(n, m, mu);
                pa.cascade_prob = self.spec.cascade_prob;
                pa.generate(seed)
            }
        }
        .map_err(err)?;
        self.with_worths(g)
    }

    fn base_graph(&self) -> Result<DependencyGraph, String> {
        match &self.spec.base {
            BaseGraph::Fixed(g) => Ok(g.clone()),
            BaseGraph::Generated(f) => self.generate(*f, GRAPH_STREAM),
        }
    }

    fn losses(
        &self,
        model: &CascadeModel,
        samples: u64,
        label: u64,
    ) -> Timed<Result<ExpectedLossVector, String>> {
        self.time(|| {
            parallel::estimate_component_losses(model, samples, self.stream(label)).map_err(err)
        })
    }

    fn row(
        &self,
        param_index: usize,
        method: Method,
        eval: Result<(f64, f64, f64), String>,
        solve_ms: f64,
        sample_ms: f64,
    ) -> SweepRow {
        let param = self.spec.values[param_index];
        let (exp_loss, exp_cost, neg_utility, failed) = match eval {
            // Adding 0.0 turns -0.0 into 0.0 so the CSV never shows "-0".
            Ok((l, c, u)) => (l + 0.0, c + 0.0, u + 0.0, None),
            Err(e) => (f64::NAN, f64::NAN, f64::NAN, Some(e)),
        };
        SweepRow {
            param,
            method,
            seed: self.seed,
            exp_loss,
            exp_cost,
            neg_utility,
            solve_ms,
            sample_ms,
            failed,
            param_index,
            rep: self.rep,
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Loss, cost and negative utility of `policy` in `inst`.
fn score(inst: &GameInstance, policy: &DefensePolicy) -> Result<(f64, f64, f64), String> {
    let e = evaluate_policy(inst, policy).map_err(err)?;
    Ok((e.expected_loss, e.expected_cost, -e.defender_utility))
}

fn instance(
    losses: &ExpectedLossVector,
    configs: &ConfigurationSet,
    priors: &GamePriors,
    zero_sum: bool,
) -> Result<GameInstance, String> {
    GameInstance::from_losses(losses, configs, priors, zero_sum).map_err(err)
}

fn solve(
    ctx: &Ctx,
    inst: &GameInstance,
    budget: Option<Budget>,
) -> Timed<Result<DefensePolicy, String>> {
    ctx.time(|| {
        parallel::solve_multiple_lp(inst, &SolveOptions::with_budget(budget))
            .map(|r| r.policy)
            .map_err(err)
    })
}

/// Two-option menu, optionally with a third option at penetration `beta`
/// costing `c / 8`.
fn menu(n: usize, c: f64, partial: Option<f64>) -> Result<ConfigurationSet, String> {
    let mut m = vec![("none", 0.0, 1.0), ("full", c, 0.0)];
    if let Some(beta) = partial {
        m.push(("partial", c / 8.0, beta));
    }
    ConfigurationSet::uniform(n, &m).map_err(err)
}

/// Runs the sweep on the current rayon pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput, SweepError> {
    spec.validate()?;
    let all: Vec<usize> = (0..spec.values.len()).collect();
    // Sweeps whose graph does not depend on the parameter share one
    // replication's graph and losses across all values.
    let per_param = matches!(
        spec.kind,
        SweepKind::Noise | SweepKind::Density | SweepKind::Mu
    );
    let tasks: Vec<Task> = (0..spec.replications)
        .flat_map(|rep| {
            if per_param {
                all.iter()
                    .map(|&p| Task {
                        rep,
                        params: vec![p],
                    })
                    .collect::<Vec<_>>()
            } else {
                vec![Task {
                    rep,
                    params: all.clone(),
                }]
            }
        })
        .collect();
    let results: Vec<(Task, TaskResult)> = tasks
        .into_par_iter()
        .map(|task| {
            let ctx = Ctx {
                spec,
                rep: task.rep,
                seed: spec.replication_seed(task.rep),
            };
            let res = run_task(&ctx, &task.params);
            (task, res)
        })
        .collect();

    let mut rows = Vec::new();
    for (task, res) in results {
        match res {
            Ok(r) => rows.extend(r),
            Err(e) => {
                let ctx = Ctx {
                    spec,
                    rep: task.rep,
                    seed: spec.replication_seed(task.rep),
                };
                for &p in &task.params {
                    for &m in spec.kind.methods() {
                        rows.push(ctx.row(p, m, Err(e.clone()), 0.0, 0.0));
                    }
                }
            }
        }
    }
    rows.sort_by_key(SweepRow::key);
    Ok(SweepOutput {
        kind: spec.kind,
        rows,
    })
}

fn run_task(ctx: &Ctx, params: &[usize]) -> TaskResult {
    match ctx.spec.kind {
        SweepKind::Cost => cost_task(ctx, params),
        SweepKind::Noise => noise_task(ctx, params),
        SweepKind::Density => density_task(ctx, params),
        SweepKind::Mu => mu_task(ctx, params),
        SweepKind::Failure => failure_task(ctx, params),
        SweepKind::Configs => configs_task(ctx, params),
        SweepKind::Samples => samples_task(ctx, params),
        SweepKind::Budget => budget_task(ctx, params),
    }
}

fn default_priors(ctx: &Ctx, n: usize) -> Result<GamePriors, String> {
    GamePriors::uniform(n, ctx.spec.attack_prob).map_err(err)
}

fn cost_task(ctx: &Ctx, params: &[usize]) -> TaskResult {
    let g = ctx.base_graph()?;
    let n = g.n();
    let zero_sum = g.is_zero_sum();
    let model = CascadeModel::Sparse(g.clone());
    let losses = ctx.losses(&model, ctx.spec.samples, SAMPLE_STREAM);
    let sample_ms = losses.ms;
    let losses = losses.value?;
    let priors = default_priors(ctx, n)?;
    let mut rows = Vec::new();
    for &p in params {
        let c = ctx.spec.values[p];
        let configs = menu(n, c, None)?;
        let inst = instance(&losses, &configs, &priors, zero_sum)?;
        let opt = solve(ctx, &inst, None);
        let opt_policy = opt.value?;
        let opt_eval = score(&inst, &opt_policy);
        let spend = opt_eval.as_ref().map(|e| e.1).unwrap_or(0.0);
        rows.push(ctx.row(p, Method::Optimal, opt_eval, opt.ms, sample_ms));

        let ind = ctx.time(|| {
            independence_policy(&g, &configs, &priors, &SolveOptions::default()).map_err(err)
        });
        let ind_eval = ind.value.and_then(|q| score(&inst, &q));
        rows.push(ctx.row(p, Method::Independence, ind_eval, ind.ms, 0.0));

        // The heuristic gets the optimum's realized spend as its budget.
        let deg = ctx.time(|| degree_heuristic_policy(&g, &configs, spend).map_err(err));
        let deg_eval = deg.value.and_then(|q| score(&inst, &q));
        rows.push(ctx.row(p, Method::DegreeHeuristic, deg_eval, deg.ms, 0.0));
    }
    Ok(rows)
}

fn noise_task(ctx: &Ctx, params: &[usize]) -> TaskResult {
    let g = ctx.base_graph()?;
    let n = g.n();
    let priors = default_priors(ctx, n)?;
    let configs = menu(n, ctx.spec.cost, None)?;
    let mut rows = Vec::new();
    for &p in params {
        let eps = ctx.spec.values[p];
        let model = apply_edge_noise(&g, eps, ctx.spec.cascade_prob).map_err(err)?;
        let losses = ctx.losses(&model, ctx.spec.samples, SAMPLE_STREAM);
        let inst = instance(&losses.value?, &configs, &priors, g.is_zero_sum())?;
        let opt = solve(ctx, &inst, None);
        let eval = opt.value.and_then(|q| score(&inst, &q));
        rows.push(ctx.row(p, Method::Optimal, eval, opt.ms, losses.ms));
    }
    Ok(rows)
}

/// Optimal policy rows for one generated graph at the fixed cost.
fn optimal_on(
    ctx: &Ctx,
    g: &DependencyGraph,
    p: usize,
    method: Method,
) -> Result<SweepRow, String> {
    let n = g.n();
    let losses = ctx.losses(
        &CascadeModel::Sparse(g.clone()),
        ctx.spec.samples,
        SAMPLE_STREAM,
    );
    let inst = instance(
        &losses.value?,
        &menu(n, ctx.spec.cost, None)?,
        &default_priors(ctx, n)?,
        g.is_zero_sum(),
    )?;
    let opt = solve(ctx, &inst, None);
    let eval = opt.value.and_then(|q| score(&inst, &q));
    Ok(ctx.row(p, method, eval, opt.ms, losses.ms))
}

fn density_task(ctx: &Ctx, params: &[usize]) -> TaskResult {
    params
        .iter()
        .map(|&p| {
            let degree = ctx.spec.values[p];
            let edge_p = if ctx.spec.n > 1 {
                degree / (ctx.spec.n - 1) as f64
            } else {
                0.0
            };
            if !(0.0..=1.0).contains(&edge_p) {
                return Err(format!(
                    "average degree {degree} is not reachable with n = {}",
                    ctx.spec.n
                ));
            }
            let g = ctx.generate(GraphFamily::ErdosRenyi { p: edge_p }, GRAPH_STREAM)?;
            optimal_on(ctx, &g, p, Method::Optimal)
        })
        .collect()
}

fn mu_task(ctx: &Ctx, params: &[usize]) -> TaskResult {
    let m = match ctx.spec.base {
        BaseGraph::Generated(GraphFamily::PreferentialAttachment { m, .. }) => m,
        _ => 1,
    };
    let mut rows = Vec::new();
    for &p in params {
        let mu = ctx.spec.values[p];
        let g = ctx.generate(GraphFamily::PreferentialAttachment { m, mu }, GRAPH_STREAM)?;
        rows.push(optimal_on(ctx, &g, p, Method::Optimal)?);
        // ER with the same expected degree; identical across mu values.
        let n = ctx.spec.n;
        let degree = 2.0 * g.edges().len() as f64 / n as f64;
        let er_p = if n > 1 {
            (degree / (n - 1) as f64).min(1.0)
        } else {
            0.0
        };
        let er = ctx.generate(GraphFamily::ErdosRenyi { p: er_p }, REFERENCE_GRAPH_STREAM)?;
        rows.push(optimal_on(ctx, &er, p, Method::ErReference)?);
    }
    Ok(rows)
}

fn failure_task(ctx: &Ctx, params: &[usize]) -> TaskResult {
    let g = ctx.base_graph()?;
    let n = g.n();
    let losses = ctx.losses(
        &CascadeModel::Sparse(g.clone()),
        ctx.spec.samples,
        SAMPLE_STREAM,
    );
    let sample_ms = losses.ms;
    let losses = losses.value?;
    let true_priors = default_priors(ctx, n)?;
    let attack_only = GamePriors::attack_only(n);
    let mut rows = Vec::new();
    for &p in params {
        let configs = menu(n, ctx.spec.values[p], None)?;
        let truth = instance(&losses, &configs, &true_priors, g.is_zero_sum())?;
        let opt = solve(ctx, &truth, None);
        rows.push(ctx.row(
            p,
            Method::Optimal,
            opt.value.and_then(|q| score(&truth, &q)),
            opt.ms,
            sample_ms,
        ));
        let assumed = instance(&losses, &configs, &attack_only, g.is_zero_sum())?;
        let ao = solve(ctx, &assumed, None);
        rows.push(ctx.row(
            p,
            Method::AttackOnly,
            ao.value.and_then(|q| score(&truth, &q)),
            ao.ms,
            0.0,
        ));
    }
    Ok(rows)
}

fn configs_task(ctx: &Ctx, params: &[usize]) -> TaskResult {
    let g = ctx.base_graph()?;
    let n = g.n();
    let losses = ctx.losses(
        &CascadeModel::Sparse(g.clone()),
        ctx.spec.samples,
        SAMPLE_STREAM,
    );
    let sample_ms = losses.ms;
    let losses = losses.value?;
    let priors = default_priors(ctx, n)?;
    let mut rows = Vec::new();
    for &p in params {
        let c = ctx.spec.values[p];
        for (method, partial) in [
            (Method::TwoConfig, None),
            (Method::HalfEighth, Some(0.5)),
            (Method::QuarterEighth, Some(0.25)),
        ] {
            let inst = instance(&losses, &menu(n, c, partial)?, &priors, g.is_zero_sum())?;
            let opt = solve(ctx, &inst, None);
            rows.push(ctx.row(
                p,
                method,
                opt.value.and_then(|q| score(&inst, &q)),
                opt.ms,
                sample_ms,
            ));
        }
    }
    Ok(rows)
}

fn samples_task(ctx: &Ctx, params: &[usize]) -> TaskResult {
    let g = ctx.base_graph()?;
    let n = g.n();
    let model = CascadeModel::Sparse(g.clone());
    let reference = ctx
        .losses(&model, ctx.spec.reference_samples, REFERENCE_STREAM)
        .value?;
    let configs = menu(n, ctx.spec.cost, None)?;
    let priors = default_priors(ctx, n)?;
    let truth = instance(&reference, &configs, &priors, g.is_zero_sum())?;
    let mut rows = Vec::new();
    for &p in params {
        let k = ctx.spec.values[p] as u64;
        let losses = if k == 0 {
            Timed {
                value: Ok(ExpectedLossVector::intrinsic(&g)),
                ms: 0.0,
            }
        } else {
            ctx.losses(&model, k, SAMPLE_STREAM)
        };
        let believed = instance(&losses.value?, &configs, &priors, g.is_zero_sum())?;
        let opt = solve(ctx, &believed, None);
        rows.push(ctx.row(
            p,
            Method::Optimal,
            opt.value.and_then(|q| score(&truth, &q)),
            opt.ms,
            losses.ms,
        ));
    }
    Ok(rows)
}

fn budget_task(ctx: &Ctx, params: &[usize]) -> TaskResult {
    let g = ctx.base_graph()?;
    let n = g.n();
    let losses = ctx.losses(
        &CascadeModel::Sparse(g.clone()),
        ctx.spec.samples,
        SAMPLE_STREAM,
    );
    let sample_ms = losses.ms;
    let configs = menu(n, ctx.spec.cost, None)?;
    let inst = instance(
        &losses.value?,
        &configs,
        &default_priors(ctx, n)?,
        g.is_zero_sum(),
    )?;
    let mut rows = Vec::new();
    for &p in params {
        let b = ctx.spec.values[p];
        let opt = solve(ctx, &inst, Some(Budget::Total(b)));
        rows.push(ctx.row(
            p,
            Method::Optimal,
            opt.value.and_then(|q| score(&inst, &q)),
            opt.ms,
            sample_ms,
        ));
        let deg = ctx.time(|| degree_heuristic_policy(&g, &configs, b).map_err(err));
        rows.push(ctx.row(
            p,
            Method::DegreeHeuristic,
            deg.value.and_then(|q| score(&inst, &q)),
            deg.ms,
            0.0,
        ));
    }
    Ok(rows)
}
