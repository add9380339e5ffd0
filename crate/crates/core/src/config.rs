//! Security configuration menus.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// One security option: the probability a direct attack still penetrates
/// (`1.0` undefended, `0.0` fully protective).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityOption {
    pub name: String,
    pub penetration: f64,
}

/// The option menu shared by all targets together with a per-target cost of
/// each option. Costs are stored option-major: `costs[o * n + t]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationSet {
    n: usize,
    options: Vec<SecurityOption>,
    costs: Vec<f64>,
}

impl ConfigurationSet {
    pub fn new(n: usize, options: Vec<SecurityOption>, costs: Vec<f64>) -> Result<Self> {
        if options.is_empty() {
            return Err(invalid!("every target needs at least one option"));
        }
        if costs.len() != options.len() * n {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} options over {n} targets need {} costs, got {}",
                options.len(),
                options.len() * n,
                costs.len()
            )));
        }
        if let Some(o) = options
            .iter()
            .find(|o| !(0.0..=1.0).contains(&o.penetration))
        {
            return Err(invalid!(
                "option {:?} has penetration {} outside [0, 1]",
                o.name,
                o.penetration
            ));
        }
        if let Some(c) = costs.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(invalid!("cost {c} must be finite and nonnegative"));
        }
        Ok(ConfigurationSet { n, options, costs })
    }

    /// The same `(name, cost, penetration)` menu at every target.
    pub fn uniform(n: usize, menu: &[(&str, f64, f64)]) -> Result<Self> {
        let options = menu
            .iter()
            .map(|&(name, _, penetration)| SecurityOption {
                name: name.into(),
                penetration,
            })
            .collect();
        let costs = menu
            .iter()
            .flat_map(|&(_, cost, _)| core::iter::repeat_n(cost, n))
            .collect();
        Self::new(n, options, costs)
    }

    /// Free option that never stops an attack, and a full defense costing `cost`.
    pub fn two_level(n: usize, cost: f64) -> Result<Self> {
        Self::uniform(n, &[("none", 0.0, 1.0), ("full", cost, 0.0)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_options(&self) -> usize {
        self.options.len()
    }

    pub fn options(&self) -> &[SecurityOption] {
        &self.options
    }

    pub fn penetration(&self, o: usize) -> f64 {
        self.options[o].penetration
    }

    pub fn cost(&self, o: usize, t: usize) -> f64 {
        self.costs[o * self.n + t]
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// Returns a copy with every cost multiplied by `factor`.
    pub fn scaled_costs(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.n,
            self.options.clone(),
            self.costs.iter().map(|c| c * factor).collect(),
        )
    }

    /// The most protective option (lowest penetration, then lowest cost at
    /// `t`, then lowest index).
    pub fn most_protective(&self, t: usize) -> usize {
        (0..self.num_options())
            .min_by(|&a, &b| {
                self.penetration(a)
                    .total_cmp(&self.penetration(b))
                    .then(self.cost(a, t).total_cmp(&self.cost(b, t)))
            })
            .expect("menu is non-empty")
    }

    /// The cheapest option at `t` (lowest index on ties).
    pub fn cheapest(&self, t: usize) -> usize {
        (0..self.num_options())
            .min_by(|&a, &b| self.cost(a, t).total_cmp(&self.cost(b, t)))
            .expect("menu is non-empty")
    }
}
