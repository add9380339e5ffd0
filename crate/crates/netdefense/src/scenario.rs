//! JSON scenario documents. See the README for the schema.

use std::fs;
use std::path::{Path, PathBuf};

use netdefense_core::generators::{
    assign_worths, ErdosRenyi, PreferentialAttachment, WorthAssignment, DEFAULT_CASCADE_PROB,
};
use netdefense_core::graph::apply_edge_noise;
use netdefense_core::{
    Budget, CascadeModel, ConfigurationSet, DependencyGraph, Directedness, GamePriors, Scenario,
    SecurityOption,
};
use serde::{Deserialize, Serialize};

use crate::formats::{load_edge_list, load_worths, FormatError};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Core(#[from] netdefense_core::Error),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub graph: GraphSpec,
    #[serde(default)]
    pub worths: WorthSpec,
    pub configurations: Vec<OptionSpec>,
    #[serde(default)]
    pub priors: PriorSpec,
    #[serde(default)]
    pub budget: Option<Budget>,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
}

/// An edge-list path, or an inline generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSpec {
    Path(PathBuf),
    Generator(GeneratorSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    ErdosRenyi {
        n: usize,
        /// Pair probability; alternatively give `avg_degree`.
        #[serde(default)]
        p: Option<f64>,
        #[serde(default)]
        avg_degree: Option<f64>,
        #[serde(default = "default_cascade_prob")]
        cascade_prob: f64,
        #[serde(default)]
        directed: bool,
        #[serde(default)]
        seed: u64,
    },
    PreferentialAttachment {
        n: usize,
        m: usize,
        #[serde(default = "default_mu")]
        mu: f64,
        #[serde(default = "default_cascade_prob")]
        cascade_prob: f64,
        #[serde(default)]
        seed: u64,
    },
}

fn default_cascade_prob() -> f64 {
    DEFAULT_CASCADE_PROB
}

fn default_mu() -> f64 {
    1.0
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<DependencyGraph, ScenarioError> {
        match *self {
            GeneratorSpec::ErdosRenyi {
                n,
                p,
                avg_degree,
                cascade_prob,
                directed,
                seed,
            } => {
                let mut er = match (p, avg_degree) {
                    (Some(p), None) => ErdosRenyi::new(n, p),
                    (None, Some(d)) => ErdosRenyi::with_average_degree(n, d),
                    _ => {
                        return Err(ScenarioError::Invalid(
                            "erdos_renyi needs exactly one of `p` and `avg_degree`".into(),
                        ))
                    }
                };
                er.cascade_prob = cascade_prob;
                if directed {
                    er.directedness = Directedness::Directed;
                }
                Ok(er.generate(seed)?)
            }
            GeneratorSpec::PreferentialAttachment {
                n,
                m,
                mu,
                cascade_prob,
                seed,
            } => {
                let mut pa = PreferentialAttachment::new(n, m, mu);
                pa.cascade_prob = cascade_prob;
                Ok(pa.generate(seed)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WorthSpec {
    Constant(f64),
    Uniform {
        seed: u64,
    },
    File(PathBuf),
    Values {
        defender: Vec<f64>,
        #[serde(default)]
        attacker: Option<Vec<f64>>,
    },
}

impl Default for WorthSpec {
    fn default() -> Self {
        WorthSpec::Constant(1.0)
    }
}

/// One menu entry: a uniform `cost` or per-target `costs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionSpec {
    pub name: String,
    pub penetration: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSpec {
    #[serde(default = "default_attack_prob")]
    pub attack_prob: f64,
    /// Random-failure distribution; uniform when absent.
    #[serde(default)]
    pub failure: Option<Vec<f64>>,
}

fn default_attack_prob() -> f64 {
    1.0
}

impl Default for PriorSpec {
    fn default() -> Self {
        PriorSpec {
            attack_prob: default_attack_prob(),
            failure: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub epsilon: f64,
    /// Cascade probability on pairs without an observed edge.
    #[serde(default = "default_cascade_prob")]
    pub base_prob: f64,
}

/// A scenario resolved into core types.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    /// Sparse graph, or the dense noisy model when `noise` is set.
    pub model: CascadeModel,
    pub budget: Option<Budget>,
}

impl ScenarioFile {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|source| ScenarioError::Json {
            path: origin.to_path_buf(),
            source,
        })
    }

    /// Relative paths resolve against `base_dir`.
    pub fn resolve(&self, base_dir: &Path) -> Result<LoadedScenario, ScenarioError> {
        let graph = match &self.graph {
            GraphSpec::Path(p) => load_edge_list(&base_dir.join(p))?,
            GraphSpec::Generator(g) => g.generate()?,
        };
        let n = graph.n();
        let mode = match &self.worths {
            WorthSpec::Constant(v) => WorthAssignment::Constant(*v),
            WorthSpec::Uniform { seed } => WorthAssignment::Uniform01 { seed: *seed },
            WorthSpec::File(p) => {
                let w = load_worths(&base_dir.join(p), n)?;
                WorthAssignment::Explicit {
                    defender: w.defender,
                    attacker: w.attacker,
                }
            }
            WorthSpec::Values { defender, attacker } => WorthAssignment::Explicit {
                defender: defender.clone(),
                attacker: attacker.clone(),
            },
        };
        let graph = assign_worths(graph, &mode)?;
        let configs = self.configurations(n)?;
        let priors = match &self.priors.failure {
            None => GamePriors::uniform(n, self.priors.attack_prob)?,
            Some(g) => GamePriors::new(self.priors.attack_prob, g.clone())?,
        };
        let model = match self.noise {
            None => CascadeModel::Sparse(graph.clone()),
            Some(ns) => apply_edge_noise(&graph, ns.epsilon, ns.base_prob)?,
        };
        Ok(LoadedScenario {
            scenario: Scenario {
                graph,
                configs,
                priors,
            },
            model,
            budget: self.budget,
        })
    }

    fn configurations(&self, n: usize) -> Result<ConfigurationSet, ScenarioError> {
        if self.configurations.is_empty() {
            return Err(ScenarioError::Invalid("`configurations` is empty".into()));
        }
        let mut options = Vec::new();
        let mut costs = Vec::new();
        for o in &self.configurations {
            match (&o.cost, &o.costs) {
                (Some(c), None) => costs.extend(std::iter::repeat_n(*c, n)),
                (None, Some(cs)) if cs.len() == n => costs.extend_from_slice(cs),
                (None, Some(cs)) => {
                    return Err(ScenarioError::Invalid(format!(
                        "option {:?} lists {} costs for {n} targets",
                        o.name,
                        cs.len()
                    )))
                }
                _ => {
                    return Err(ScenarioError::Invalid(format!(
                        "option {:?} needs exactly one of `cost` and `costs`",
                        o.name
                    )))
                }
            }
            options.push(SecurityOption {
                name: o.name.clone(),
                penetration: o.penetration,
            });
        }
        Ok(ConfigurationSet::new(n, options, costs)?)
    }
}

pub fn load_scenario(path: &Path) -> Result<LoadedScenario, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::InFile {
        path: path.to_path_buf(),
        source: Box::new(e.into()),
    })?;
    let file = ScenarioFile::parse(&text, path)?;
    file.resolve(path.parent().unwrap_or(Path::new(".")))
}
