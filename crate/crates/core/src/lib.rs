//! Optimal randomized defense policies for interdependent assets.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the algorithmic side:
//!
//! * [`graph`] and [`generators`]: dependency graphs, worths, cascade
//!   probabilities, random graph models and the edge-noise transform.
//! * [`cascade`] and [`tree`]: expected cascade losses, by live-edge Monte
//!   Carlo sampling on general graphs and exactly on trees.
//! * [`utility`]: per-configuration defender and attacker utility matrices.
//! * [`lp`] and [`game`]: the multiple-LP Stackelberg solver, with a dense
//!   simplex backend and an exact structured backend for the unbudgeted case.
//! * [`baselines`]: the independence and degree-heuristic comparison policies
//!   and a worst-case family for the independence assumption.
//!
//! IO, parallel drivers and the experiment CLI live in the `netdefense` crate.
#![cfg_attr(not(test), no_std)]
#![deny(missing_debug_implementations)]

extern crate alloc;

pub mod baselines;
pub mod cascade;
pub mod config;
pub mod error;
pub mod game;
pub mod generators;
pub mod graph;
pub mod lp;
pub mod rng;
pub mod scenario;
pub mod tree;
pub mod unionfind;
pub mod utility;

mod envelope;
mod sum;

pub use cascade::{ExpectedLossVector, LossAccumulator};
pub use config::{ConfigurationSet, SecurityOption};
pub use error::{Error, Result};
pub use game::{
    Budget, DefensePolicy, Evaluation, GameInstance, GamePriors, LpBackend, LpStatus, SolveOptions,
    SolveResult,
};
pub use graph::{CascadeModel, DependencyGraph, Directedness, Edge, TargetId};
pub use scenario::Scenario;
pub use utility::UtilityMatrices;
