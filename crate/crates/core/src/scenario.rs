use crate::cascade::ExpectedLossVector;
use crate::config::ConfigurationSet;
use crate::error::Result;
use crate::game::{GameInstance, GamePriors};
use crate::graph::DependencyGraph;

/// A complete problem: graph with worths, option menu and priors.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub graph: DependencyGraph,
    pub configs: ConfigurationSet,
    pub priors: GamePriors,
}

impl Scenario {
    /// The game induced by `losses`; zero-sum when attacker worths equal
    /// defender worths.
    pub fn instance(&self, losses: &ExpectedLossVector) -> Result<GameInstance> {
        GameInstance::from_losses(
            losses,
            &self.configs,
            &self.priors,
            self.graph.is_zero_sum(),
        )
    }
}
