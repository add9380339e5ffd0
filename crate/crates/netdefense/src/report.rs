//! JSON documents emitted by `solve` and `baseline`.

use netdefense_core::{ConfigurationSet, DefensePolicy, Evaluation, LpStatus, SolveResult};
use serde::{Deserialize, Serialize};

/// Per-phase wall-clock times in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub load_ms: f64,
    pub sample_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
}

/// Policy as one row per target, one column per option (in menu order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyMatrix {
    pub options: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl PolicyMatrix {
    pub fn new(policy: &DefensePolicy, configs: &ConfigurationSet) -> Self {
        let k = policy.num_options();
        PolicyMatrix {
            options: configs.options().iter().map(|o| o.name.clone()).collect(),
            rows: (0..policy.n())
                .map(|t| (0..k).map(|o| policy.prob(o, t)).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub objective: f64,
    pub attacked_target: usize,
    pub policy: PolicyMatrix,
    pub per_lp_status: Vec<LpStatus>,
    pub evaluation: Evaluation,
    pub samples: u64,
    pub timings: Timings,
}

impl SolveReport {
    pub fn new(
        result: &SolveResult,
        configs: &ConfigurationSet,
        evaluation: Evaluation,
        samples: u64,
        timings: Timings,
    ) -> Self {
        SolveReport {
            objective: result.objective,
            attacked_target: result.attacked_target.index(),
            policy: PolicyMatrix::new(&result.policy, configs),
            per_lp_status: result.per_lp_status.clone(),
            evaluation,
            samples,
            timings,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub method: String,
    pub policy: PolicyMatrix,
    pub evaluation: Evaluation,
    /// The optimal policy's value on the same losses, for comparison.
    pub optimal_utility: f64,
    pub samples: u64,
}
