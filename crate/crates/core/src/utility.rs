//! Per-configuration utility matrices.
//!
//! Defense only matters at the attacked target: a blocked entry stops the
//! whole cascade, a penetrating one triggers it with the target's expected
//! loss. One loss vector therefore yields `U[o][t] = -beta_o * L_def(t)`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cascade::ExpectedLossVector;
use crate::config::ConfigurationSet;
use crate::error::{Error, Result};

/// Defender utilities `U` (nonpositive) and attacker utilities `V`, stored
/// option-major: `u[o * n + t]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityMatrices {
    n: usize,
    num_options: usize,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl UtilityMatrices {
    pub fn new(n: usize, num_options: usize, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != n * num_options || v.len() != n * num_options {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{num_options}x{n} utility matrices need {} entries each",
                n * num_options
            )));
        }
        Ok(UtilityMatrices {
            n,
            num_options,
            u,
            v,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_options(&self) -> usize {
        self.num_options
    }

    pub fn u(&self, o: usize, t: usize) -> f64 {
        self.u[o * self.n + t]
    }

    pub fn v(&self, o: usize, t: usize) -> f64 {
        self.v[o * self.n + t]
    }
}

pub fn build_utility_matrices(
    losses: &ExpectedLossVector,
    configs: &ConfigurationSet,
    zero_sum: bool,
) -> Result<UtilityMatrices> {
    let n = losses.n();
    if configs.n() != n {
        return Err(Error::DimensionMismatch(alloc::format!(
            "loss vector covers {n} targets, configurations cover {}",
            configs.n()
        )));
    }
    let k = configs.num_options();
    let mut u = Vec::with_capacity(k * n);
    let mut v = Vec::with_capacity(k * n);
    for o in 0..k {
        let beta = configs.penetration(o);
        for t in 0..n {
            let ut = 0.0 - beta * losses.loss_def[t];
            u.push(ut);
            v.push(if zero_sum {
                0.0 - ut
            } else {
                beta * losses.loss_atk[t]
            });
        }
    }
    UtilityMatrices::new(n, k, u, v)
}
