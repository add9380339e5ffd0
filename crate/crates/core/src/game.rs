//! Multiple-LP Stackelberg solver.
//!
//! For each candidate target `t_hat` one LP finds the best randomized
//! defense under which `t_hat` is a best response for the attacker:
//!
//! ```text
//! max  r * sum_o U[o][t_hat] q[o][t_hat]
//!        + (1 - r) * sum_{t,o} g_t U[o][t] q[o][t]  -  sum_{t,o} c[o][t] q[o][t]
//! s.t. q[o][t] in [0, 1],  sum_o q[o][t] = 1,
//!      sum_o V[o][t] q[o][t] <= sum_o V[o][t_hat] q[o][t_hat]   for all t
//! ```
//!
//! The defender commits to the best feasible LP solution.
//!
//! Two backends solve the fixed-target LP. The simplex backend builds it
//! literally. The structured backend uses that, once the attacker value
//! `v` at `t_hat` is fixed, the LP splits into one two-constraint problem per
//! target whose optimum is a concave piecewise-linear function of `v`; the
//! LP optimum is the maximum over `v` of their sum, attained at a breakpoint.
//! It is exact, runs in near-linear time per LP, and handles everything but
//! budget constraints, which couple the targets.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cascade::ExpectedLossVector;
use crate::config::ConfigurationSet;
use crate::envelope::{Envelope, Vertex};
use crate::error::{invalid, Error, Result};
use crate::graph::TargetId;
use crate::lp::{self, ConstraintKind, LinearProgram, LpSolution};
use crate::sum::CompensatedSum;
use crate::utility::{build_utility_matrices, UtilityMatrices};

/// Feasibility tolerance for returned policies.
pub const FEASIBILITY_TOL: f64 = 1e-7;

/// Attack prior `r` and the distribution `g` of random failures given no attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GamePriors {
    pub attack_prob: f64,
    pub failure: Vec<f64>,
}

impl GamePriors {
    pub fn new(attack_prob: f64, failure: Vec<f64>) -> Result<Self> {
        if !(0.0..=1.0).contains(&attack_prob) {
            return Err(invalid!("attack probability {attack_prob} outside [0, 1]"));
        }
        if failure.is_empty() {
            return Err(invalid!("failure distribution is empty"));
        }
        if failure.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(invalid!("failure probabilities must be nonnegative"));
        }
        let total: f64 = failure.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid!("failure probabilities sum to {total}, not 1"));
        }
        Ok(GamePriors {
            attack_prob,
            failure,
        })
    }

    /// Attack prior `r` with uniform random failures.
    pub fn uniform(n: usize, attack_prob: f64) -> Result<Self> {
        Self::new(attack_prob, vec![1.0 / n as f64; n])
    }

    /// Every failure is an attack.
    pub fn attack_only(n: usize) -> Self {
        Self::uniform(n, 1.0).expect("valid priors")
    }
}

/// Randomized defense: `q[o * n + t]` is the probability of option `o` at `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefensePolicy {
    n: usize,
    num_options: usize,
    q: Vec<f64>,
}

impl DefensePolicy {
    pub fn new(n: usize, num_options: usize, q: Vec<f64>) -> Result<Self> {
        if q.len() != n * num_options {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{num_options}x{n} policy needs {} entries, got {}",
                n * num_options,
                q.len()
            )));
        }
        let p = DefensePolicy { n, num_options, q };
        p.check(FEASIBILITY_TOL)?;
        Ok(p)
    }

    /// Deterministic policy deploying `choice[t]` at each target.
    pub fn pure(num_options: usize, choice: &[usize]) -> Result<Self> {
        let n = choice.len();
        let mut q = vec![0.0; n * num_options];
        for (t, &o) in choice.iter().enumerate() {
            if o >= num_options {
                return Err(invalid!("option {o} out of range at target {t}"));
            }
            q[o * n + t] = 1.0;
        }
        Ok(DefensePolicy { n, num_options, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_options(&self) -> usize {
        self.num_options
    }

    pub fn prob(&self, o: usize, t: usize) -> f64 {
        self.q[o * self.n + t]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.q
    }

    /// Row `o` of the policy matrix.
    pub fn option_row(&self, o: usize) -> &[f64] {
        &self.q[o * self.n..(o + 1) * self.n]
    }

    /// Checks `q in [0, 1]` and that each target's column sums to one.
    pub fn check(&self, tol: f64) -> Result<()> {
        if let Some(x) = self.q.iter().find(|x| !(**x >= -tol && **x <= 1.0 + tol)) {
            return Err(invalid!("policy probability {x} outside [0, 1]"));
        }
        for t in 0..self.n {
            let s: f64 = (0..self.num_options).map(|o| self.prob(o, t)).sum();
            if (s - 1.0).abs() > tol {
                return Err(invalid!("policy at target {t} sums to {s}"));
            }
        }
        Ok(())
    }

    pub fn expected_cost(&self, configs: &ConfigurationSet) -> f64 {
        let mut total = 0.0;
        for t in 0..self.n {
            total += self.target_cost(configs, t);
        }
        total
    }

    fn target_cost(&self, configs: &ConfigurationSet, t: usize) -> f64 {
        (0..self.num_options)
            .map(|o| configs.cost(o, t) * self.prob(o, t))
            .sum()
    }
}

/// Optional linear budget on expected defense spending.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    /// `sum_{t,o} c[o][t] q[o][t] <= B`
    Total(f64),
    /// `sum_o c[o][t] q[o][t] <= B` at every target.
    PerTarget(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpBackend {
    /// Structured when no budget is set, simplex otherwise.
    #[default]
    Auto,
    Simplex,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub budget: Option<Budget>,
    /// With `r = 0` the objective ignores which target is attacked, so a
    /// single LP without attacker constraints gives the optimum.
    pub short_circuit_zero_attack: bool,
    pub backend: LpBackend,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            budget: None,
            short_circuit_zero_attack: true,
            backend: LpBackend::Auto,
        }
    }
}

impl SolveOptions {
    pub fn with_budget(budget: Option<Budget>) -> Self {
        SolveOptions {
            budget,
            ..Self::default()
        }
    }
}

/// A game ready to solve: utilities, option costs and priors over one target set.
#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance {
    utilities: UtilityMatrices,
    configs: ConfigurationSet,
    priors: GamePriors,
}

impl GameInstance {
    pub fn new(
        utilities: UtilityMatrices,
        configs: ConfigurationSet,
        priors: GamePriors,
    ) -> Result<Self> {
        let n = utilities.n();
        if configs.n() != n || priors.failure.len() != n {
            return Err(Error::DimensionMismatch(alloc::format!(
                "utilities cover {n} targets, configurations {}, priors {}",
                configs.n(),
                priors.failure.len()
            )));
        }
        if configs.num_options() != utilities.num_options() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} options in utilities, {} in configurations",
                utilities.num_options(),
                configs.num_options()
            )));
        }
        Ok(GameInstance {
            utilities,
            configs,
            priors,
        })
    }

    /// Builds utilities from a loss vector and wraps them with costs and priors.
    pub fn from_losses(
        losses: &ExpectedLossVector,
        configs: &ConfigurationSet,
        priors: &GamePriors,
        zero_sum: bool,
    ) -> Result<Self> {
        let utilities = build_utility_matrices(losses, configs, zero_sum)?;
        Self::new(utilities, configs.clone(), priors.clone())
    }

    pub fn n(&self) -> usize {
        self.utilities.n()
    }

    pub fn num_options(&self) -> usize {
        self.utilities.num_options()
    }

    pub fn utilities(&self) -> &UtilityMatrices {
        &self.utilities
    }

    pub fn configs(&self) -> &ConfigurationSet {
        &self.configs
    }

    pub fn priors(&self) -> &GamePriors {
        &self.priors
    }

    /// Same game under different priors.
    pub fn with_priors(&self, priors: GamePriors) -> Result<Self> {
        Self::new(self.utilities.clone(), self.configs.clone(), priors)
    }

    /// Objective coefficient of `q[o][t]` excluding the attack term.
    fn base_coeff(&self, o: usize, t: usize) -> f64 {
        let r = self.priors.attack_prob;
        (1.0 - r) * self.priors.failure[t] * self.utilities.u(o, t) - self.configs.cost(o, t)
    }

    fn attacker_value(&self, policy: &DefensePolicy, t: usize) -> f64 {
        (0..self.num_options())
            .map(|o| self.utilities.v(o, t) * policy.prob(o, t))
            .sum()
    }

    fn defender_value(&self, policy: &DefensePolicy, t: usize) -> f64 {
        (0..self.num_options())
            .map(|o| self.utilities.u(o, t) * policy.prob(o, t))
            .sum()
    }

    fn check_policy(&self, policy: &DefensePolicy) -> Result<()> {
        if policy.n() != self.n() || policy.num_options() != self.num_options() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "policy is {}x{}, game is {}x{}",
                policy.num_options(),
                policy.n(),
                self.num_options(),
                self.n()
            )));
        }
        Ok(())
    }

    /// Defender objective of `policy` when `t_hat` is the attacked target.
    pub fn objective(&self, policy: &DefensePolicy, t_hat: TargetId) -> Result<f64> {
        self.check_policy(policy)?;
        Ok(self.objective_unchecked(policy, t_hat.0))
    }

    fn objective_unchecked(&self, policy: &DefensePolicy, t_hat: usize) -> f64 {
        let r = self.priors.attack_prob;
        let mut random = 0.0;
        let mut cost = 0.0;
        for t in 0..self.n() {
            random += self.priors.failure[t] * self.defender_value(policy, t);
            cost += policy.target_cost(&self.configs, t);
        }
        r * self.defender_value(policy, t_hat) + (1.0 - r) * random - cost
    }
}

/// Result of one fixed-target LP.
#[derive(Debug, Clone, PartialEq)]
pub enum FixedTargetOutcome {
    Optimal {
        policy: DefensePolicy,
        objective: f64,
    },
    /// No policy makes `t_hat` a best response (within the budget).
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum LpStatus {
    Optimal(f64),
    Infeasible,
    /// Not solved because the zero-attack shortcut applied.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub policy: DefensePolicy,
    pub objective: f64,
    pub attacked_target: TargetId,
    pub per_lp_status: Vec<LpStatus>,
}

/// A policy's value against a best-responding attacker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub defender_utility: f64,
    pub attacker_target: TargetId,
    pub attacker_utility: f64,
    /// Expected loss from attacks and random failures (a nonnegative number
    /// when utilities are nonpositive).
    pub expected_loss: f64,
    pub expected_cost: f64,
}

/// Attacker values within this relative distance of the maximum count as
/// ties; ties go to the defender.
const ATTACKER_TIE_TOL: f64 = 1e-9;

/// Evaluates `policy` against an attacker who best responds to it. Ties are
/// broken in the defender's favor, then by lowest index.
pub fn evaluate_policy(inst: &GameInstance, policy: &DefensePolicy) -> Result<Evaluation> {
    inst.check_policy(policy)?;
    let n = inst.n();
    let attacker: Vec<f64> = (0..n).map(|t| inst.attacker_value(policy, t)).collect();
    let defender: Vec<f64> = (0..n).map(|t| inst.defender_value(policy, t)).collect();
    let best = attacker.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = ATTACKER_TIE_TOL * best.abs().max(1.0);
    let mut target = 0;
    let mut found = false;
    for t in 0..n {
        if attacker[t] >= best - tol && (!found || defender[t] > defender[target]) {
            target = t;
            found = true;
        }
    }
    let r = inst.priors.attack_prob;
    let random: f64 = (0..n).map(|t| inst.priors.failure[t] * defender[t]).sum();
    let expected_cost = policy.expected_cost(&inst.configs);
    let expected_loss = -(r * defender[target] + (1.0 - r) * random);
    Ok(Evaluation {
        defender_utility: -expected_loss - expected_cost,
        attacker_target: TargetId(target),
        attacker_utility: attacker[target],
        expected_loss,
        expected_cost,
    })
}

/// Precomputed state of the structured backend.
#[derive(Debug, Clone)]
struct StructuredPrep {
    /// Per target: best base objective reachable with attacker value `<= v`.
    follower: Vec<Envelope>,
    /// Smallest attacker value every target can be pushed down to.
    floor: f64,
    /// Breakpoints of the summed follower envelopes on `[floor, inf)`.
    xs: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl StructuredPrep {
    fn new(inst: &GameInstance) -> Self {
        let n = inst.n();
        let k = inst.num_options();
        let follower: Vec<Envelope> = (0..n)
            .map(|t| {
                let pts: Vec<Vertex> = (0..k)
                    .map(|o| Vertex {
                        x: inst.utilities.v(o, t),
                        y: inst.base_coeff(o, t),
                        option: o,
                    })
                    .collect();
                Envelope::monotone(&pts)
            })
            .collect();
        let floor = follower
            .iter()
            .map(Envelope::x_min)
            .fold(f64::NEG_INFINITY, f64::max);

        let mut value = CompensatedSum::default();
        let mut slope = CompensatedSum::default();
        let mut events: Vec<(f64, f64)> = Vec::new();
        for env in &follower {
            value.add(env.eval(floor));
            slope.add(env.slope_right(floor));
            let m = env.vertices.len();
            for j in 1..m {
                let x = env.vertices[j].x;
                if x > floor {
                    let after = if j + 1 < m { env.slope(j) } else { 0.0 };
                    events.push((x, after - env.slope(j - 1)));
                }
            }
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut xs = vec![floor];
        let mut values = vec![value.value()];
        let mut slopes = vec![slope.value()];
        let mut i = 0;
        while i < events.len() {
            let x = events[i].0;
            let last = xs.len() - 1;
            let h = values[last] + slopes[last] * (x - xs[last]);
            while i < events.len() && events[i].0 == x {
                slope.add(events[i].1);
                i += 1;
            }
            xs.push(x);
            values.push(h);
            slopes.push(slope.value());
        }
        StructuredPrep {
            follower,
            floor,
            xs,
            values,
            slopes,
        }
    }

    /// Sum of all follower envelopes at `v >= floor`.
    fn total(&self, v: f64) -> f64 {
        let i = self.xs.partition_point(|&x| x <= v).saturating_sub(1);
        self.values[i] + self.slopes[i] * (v - self.xs[i])
    }

    fn solve(&self, inst: &GameInstance, t_hat: usize) -> FixedTargetOutcome {
        let n = inst.n();
        let k = inst.num_options();
        let r = inst.priors.attack_prob;
        let leader_pts: Vec<Vertex> = (0..k)
            .map(|o| Vertex {
                x: inst.utilities.v(o, t_hat),
                y: inst.base_coeff(o, t_hat) + r * inst.utilities.u(o, t_hat),
                option: o,
            })
            .collect();
        let leader = Envelope::upper_hull(&leader_pts);
        let (lo, hi) = (self.floor, leader.x_max());
        if hi < lo {
            return FixedTargetOutcome::Infeasible;
        }
        let own = &self.follower[t_hat];
        let value = |v: f64| leader.eval(v) + self.total(v) - own.eval(v);

        let mut best_v = lo;
        let mut best = value(lo);
        let mut consider = |v: f64| {
            if (lo..=hi).contains(&v) {
                let f = value(v);
                if f > best || (f == best && v < best_v) {
                    best = f;
                    best_v = v;
                }
            }
        };
        consider(hi);
        for p in leader.vertices.iter().chain(&own.vertices) {
            consider(p.x);
        }
        let start = self.xs.partition_point(|&x| x <= lo);
        for &x in &self.xs[start..] {
            if x > hi {
                break;
            }
            consider(x);
        }

        let mut q = vec![0.0; n * k];
        for t in 0..n {
            let mix = if t == t_hat {
                leader.mix_at(best_v)
            } else {
                self.follower[t].mix_at(best_v)
            };
            q[mix.left * n + t] += 1.0 - mix.lambda;
            q[mix.right * n + t] += mix.lambda;
        }
        let policy = DefensePolicy {
            n,
            num_options: k,
            q,
        };
        let objective = inst.objective_unchecked(&policy, t_hat);
        FixedTargetOutcome::Optimal { policy, objective }
    }
}

/// Solves the fixed-target LPs of one game; shareable across threads.
#[derive(Debug, Clone)]
pub struct FixedTargetSolver<'a> {
    inst: &'a GameInstance,
    options: SolveOptions,
    structured: Option<StructuredPrep>,
}

impl<'a> FixedTargetSolver<'a> {
    pub fn new(inst: &'a GameInstance, options: SolveOptions) -> Result<Self> {
        if let Some(b) = options.budget {
            let value = match b {
                Budget::Total(v) | Budget::PerTarget(v) => v,
            };
            if !value.is_finite() {
                return Err(invalid!("budget {value} must be finite"));
            }
        }
        let structured = match (options.backend, options.budget) {
            (LpBackend::Structured, Some(_)) => {
                return Err(invalid!("the structured backend does not support budgets"))
            }
            (LpBackend::Structured, None) | (LpBackend::Auto, None) => {
                Some(StructuredPrep::new(inst))
            }
            _ => None,
        };
        Ok(FixedTargetSolver {
            inst,
            options,
            structured,
        })
    }

    pub fn n(&self) -> usize {
        self.inst.n()
    }

    pub fn instance(&self) -> &GameInstance {
        self.inst
    }

    pub fn solve(&self, t_hat: TargetId) -> Result<FixedTargetOutcome> {
        if t_hat.0 >= self.n() {
            return Err(invalid!("target {} outside [0, {})", t_hat.0, self.n()));
        }
        match &self.structured {
            Some(prep) => Ok(prep.solve(self.inst, t_hat.0)),
            None => solve_with_simplex(self.inst, Some(t_hat.0), self.options.budget),
        }
    }

    /// True when `solve_multiple_lp` would skip the per-target LPs.
    pub fn uses_zero_attack_shortcut(&self) -> bool {
        self.options.short_circuit_zero_attack && self.inst.priors.attack_prob == 0.0
    }

    /// The single unconstrained LP used by the zero-attack shortcut.
    pub fn solve_without_attacker(&self) -> Result<SolveResult> {
        let inst = self.inst;
        let (n, k) = (inst.n(), inst.num_options());
        let policy = match self.options.budget {
            None => {
                let choice: Vec<usize> = (0..n)
                    .map(|t| {
                        (0..k).fold(0, |best, o| {
                            if inst.base_coeff(o, t) > inst.base_coeff(best, t) {
                                o
                            } else {
                                best
                            }
                        })
                    })
                    .collect();
                DefensePolicy::pure(k, &choice)?
            }
            Some(_) => match solve_with_simplex(inst, None, self.options.budget)? {
                FixedTargetOutcome::Optimal { policy, .. } => policy,
                FixedTargetOutcome::Infeasible => return Err(Error::AllInfeasible),
            },
        };
        let eval = evaluate_policy(inst, &policy)?;
        let objective = inst.objective_unchecked(&policy, eval.attacker_target.0);
        Ok(SolveResult {
            policy,
            objective,
            attacked_target: eval.attacker_target,
            per_lp_status: vec![LpStatus::Skipped; n],
        })
    }
}

/// Solves the LP that fixes `t_hat` as the attacked target.
pub fn solve_fixed_target_lp(
    inst: &GameInstance,
    t_hat: TargetId,
    budget: Option<Budget>,
) -> Result<FixedTargetOutcome> {
    FixedTargetSolver::new(inst, SolveOptions::with_budget(budget))?.solve(t_hat)
}

/// Index of the best `Optimal` status: largest objective, lowest index on
/// ties (objectives within `1e-9` relative count as tied).
pub fn best_lp_index(statuses: &[LpStatus]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (t, s) in statuses.iter().enumerate() {
        if let LpStatus::Optimal(obj) = *s {
            if best.is_none_or(|(_, b)| improves(obj, b)) {
                best = Some((t, obj));
            }
        }
    }
    best.map(|(t, _)| t)
}

fn improves(candidate: f64, incumbent: f64) -> bool {
    candidate > incumbent + 1e-9 * incumbent.abs().max(1.0)
}

/// Picks the feasible outcome with the largest objective, lowest index on ties.
pub fn select_best(outcomes: Vec<FixedTargetOutcome>) -> Result<SolveResult> {
    let mut statuses = Vec::with_capacity(outcomes.len());
    let mut policies = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        match outcome {
            FixedTargetOutcome::Infeasible => {
                statuses.push(LpStatus::Infeasible);
                policies.push(None);
            }
            FixedTargetOutcome::Optimal { policy, objective } => {
                statuses.push(LpStatus::Optimal(objective));
                policies.push(Some(policy));
            }
        }
    }
    let t = best_lp_index(&statuses).ok_or(Error::AllInfeasible)?;
    let LpStatus::Optimal(objective) = statuses[t] else {
        unreachable!("best index points at an optimal status")
    };
    Ok(SolveResult {
        policy: policies[t].take().expect("optimal outcomes carry a policy"),
        objective,
        attacked_target: TargetId(t),
        per_lp_status: statuses,
    })
}

/// Runs every fixed-target LP and keeps the best feasible solution. Only the
/// incumbent policy is held in memory.
pub fn solve_multiple_lp(inst: &GameInstance, options: &SolveOptions) -> Result<SolveResult> {
    let solver = FixedTargetSolver::new(inst, *options)?;
    if solver.uses_zero_attack_shortcut() {
        return solver.solve_without_attacker();
    }
    let mut statuses = Vec::with_capacity(inst.n());
    let mut best: Option<(usize, DefensePolicy, f64)> = None;
    for t in 0..inst.n() {
        match solver.solve(TargetId(t))? {
            FixedTargetOutcome::Infeasible => statuses.push(LpStatus::Infeasible),
            FixedTargetOutcome::Optimal { policy, objective } => {
                statuses.push(LpStatus::Optimal(objective));
                if best.as_ref().is_none_or(|b| improves(objective, b.2)) {
                    best = Some((t, policy, objective));
                }
            }
        }
    }
    let (t, policy, objective) = best.ok_or(Error::AllInfeasible)?;
    Ok(SolveResult {
        policy,
        objective,
        attacked_target: TargetId(t),
        per_lp_status: statuses,
    })
}

/// Builds and solves the fixed-target LP with the simplex backend. With
/// `t_hat = None` the attacker constraints are dropped.
fn solve_with_simplex(
    inst: &GameInstance,
    t_hat: Option<usize>,
    budget: Option<Budget>,
) -> Result<FixedTargetOutcome> {
    let (n, k) = (inst.n(), inst.num_options());
    let r = inst.priors.attack_prob;
    let var = |o: usize, t: usize| o * n + t;
    let mut lp = LinearProgram::new(n * k);
    for o in 0..k {
        for t in 0..n {
            let mut c = inst.base_coeff(o, t);
            if Some(t) == t_hat {
                c += r * inst.utilities.u(o, t);
            }
            lp.objective[var(o, t)] = c;
        }
    }
    for t in 0..n {
        lp.add(
            (0..k).map(|o| (var(o, t), 1.0)).collect(),
            ConstraintKind::Eq,
            1.0,
        );
    }
    if let Some(th) = t_hat {
        for t in (0..n).filter(|&t| t != th) {
            let mut row: Vec<(usize, f64)> = (0..k)
                .map(|o| (var(o, t), inst.utilities.v(o, t)))
                .collect();
            row.extend((0..k).map(|o| (var(o, th), -inst.utilities.v(o, th))));
            lp.add(row, ConstraintKind::Le, 0.0);
        }
    }
    match budget {
        None => {}
        Some(Budget::Total(b)) => {
            let row = (0..k)
                .flat_map(|o| (0..n).map(move |t| (o, t)))
                .map(|(o, t)| (var(o, t), inst.configs.cost(o, t)))
                .collect();
            lp.add(row, ConstraintKind::Le, b);
        }
        Some(Budget::PerTarget(b)) => {
            for t in 0..n {
                let row = (0..k)
                    .map(|o| (var(o, t), inst.configs.cost(o, t)))
                    .collect();
                lp.add(row, ConstraintKind::Le, b);
            }
        }
    }
    match lp::solve(&lp)? {
        LpSolution::Infeasible => Ok(FixedTargetOutcome::Infeasible),
        LpSolution::Unbounded => Err(Error::Numerical("bounded LP reported unbounded".into())),
        LpSolution::Optimal { x, .. } => {
            let mut q = x;
            for t in 0..n {
                let s: f64 = (0..k).map(|o| q[var(o, t)]).sum();
                for o in 0..k {
                    q[var(o, t)] = (q[var(o, t)] / s).clamp(0.0, 1.0);
                }
            }
            let policy = DefensePolicy {
                n,
                num_options: k,
                q,
            };
            let objective = inst.objective_unchecked(&policy, t_hat.unwrap_or(0));
            Ok(FixedTargetOutcome::Optimal { policy, objective })
        }
    }
}
