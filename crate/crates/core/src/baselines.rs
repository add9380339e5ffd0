//! Comparison policies and a worst case for ignoring interdependence.

use alloc::vec;
use alloc::vec::Vec;

use crate::cascade::ExpectedLossVector;
use crate::config::ConfigurationSet;
use crate::error::{invalid, Result};
use crate::game::{solve_multiple_lp, DefensePolicy, GameInstance, GamePriors, SolveOptions};
use crate::graph::DependencyGraph;
use crate::scenario::Scenario;

/// Optimal policy for a model that treats targets as independent, i.e.
/// sets `L(t) = w_t`. Evaluate it against the true cascade utilities.
pub fn independence_policy(
    graph: &DependencyGraph,
    configs: &ConfigurationSet,
    priors: &GamePriors,
    options: &SolveOptions,
) -> Result<DefensePolicy> {
    let losses = ExpectedLossVector::intrinsic(graph);
    let inst = GameInstance::from_losses(&losses, configs, priors, graph.is_zero_sum())?;
    Ok(solve_multiple_lp(&inst, options)?.policy)
}

/// Vaccination-style heuristic: visit targets by decreasing degree (lowest
/// index first on ties) and deploy the most protective option wherever its
/// cost still fits the remaining budget; everything else gets the free option.
pub fn degree_heuristic_policy(
    graph: &DependencyGraph,
    configs: &ConfigurationSet,
    budget: f64,
) -> Result<DefensePolicy> {
    let n = graph.n();
    if configs.n() != n {
        return Err(invalid!(
            "configurations cover {} targets, graph has {n}",
            configs.n()
        ));
    }
    if !(budget.is_finite() && budget >= 0.0) {
        return Err(invalid!("budget {budget} must be finite and nonnegative"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| graph.degree(b).cmp(&graph.degree(a)).then(a.cmp(&b)));

    let mut choice = vec![0; n];
    let mut remaining = budget;
    for &t in &order {
        let null = configs.cheapest(t);
        if configs.cost(null, t) != 0.0 {
            return Err(invalid!("target {t} has no free option"));
        }
        let defend = configs.most_protective(t);
        let cost = configs.cost(defend, t);
        if cost <= remaining {
            remaining -= cost;
            choice[t] = defend;
        } else {
            choice[t] = null;
        }
    }
    DefensePolicy::pure(configs.num_options(), &choice)
}

/// Star on `n` targets on which the independence policy is a factor of
/// order `n` worse than the optimum.
///
/// Target 0 is a hub of negligible worth, the `n - 1` leaves have worth 1,
/// and every edge cascades with certainty, so an attack anywhere destroys
/// everything. Full defense costs `1 / (2n)` per target: cheap enough that
/// the optimum defends every target, while a defender ignoring the edges
/// protects only the leaves and leaves the hub open.
pub fn star_family(n: usize) -> Result<Scenario> {
    if n < 2 {
        return Err(invalid!("the star family needs n >= 2"));
    }
    let cost = 1.0 / (2.0 * n as f64);
    let hub_worth = cost / 10.0;
    let edges: Vec<(usize, usize, f64)> = (1..n).map(|leaf| (0, leaf, 1.0)).collect();
    let mut worths = vec![1.0; n];
    worths[0] = hub_worth;
    let graph = DependencyGraph::undirected(n, &edges)?.with_worths(worths, None)?;
    Ok(Scenario {
        graph,
        configs: ConfigurationSet::two_level(n, cost)?,
        priors: GamePriors::attack_only(n),
    })
}
