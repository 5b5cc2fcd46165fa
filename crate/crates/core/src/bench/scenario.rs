use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::graph::NodeId;
use crate::ingest::{Regime, SyntheticSpec};
use crate::search::{FrontierPolicy, SearchConfig};
use crate::store::CacheConfig;

use super::BenchError;

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

/// Where the graph of a scenario comes from. Relative paths are resolved
/// against the scenario file's directory by [`load_scenario`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSource {
    Jsonl(PathBuf),
    Synthetic(SyntheticSpec),
    Store(PathBuf),
}

/// A pair endpoint: a NodeId or a `Class.method` name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Id(u32),
    Name(String),
}

impl From<NodeId> for Endpoint {
    fn from(id: NodeId) -> Self {
        Endpoint::Id(id.0)
    }
}

impl From<&str> for Endpoint {
    fn from(name: &str) -> Self {
        Endpoint::Name(name.to_string())
    }
}

/// Parameters for drawing endpoint pairs of one regime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSampling {
    pub regime: Regime,
    pub budget: usize,
    pub seed: u64,
    /// Keep only pairs with a call path from initial to final.
    #[serde(default)]
    pub require_path: bool,
    /// Candidate draws before giving up; defaults to `max(1024, 64 * budget)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_attempts: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairSpec {
    Explicit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        from: Endpoint,
        to: Endpoint,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        regime: Option<Regime>,
    },
    Sampled {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        sample: PairSampling,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub label: String,
    #[serde(flatten)]
    pub config: SearchConfig,
}

impl AlgorithmSpec {
    pub fn new(label: impl Into<String>, config: SearchConfig) -> Self {
        AlgorithmSpec { label: label.into(), config }
    }

    /// A1 (delay 3), A2 (delay 6), A3 (probe only), A4 (balanced).
    pub fn standard_variants() -> Vec<AlgorithmSpec> {
        vec![
            AlgorithmSpec::new("A1", SearchConfig::a1()),
            AlgorithmSpec::new("A2", SearchConfig::a2()),
            AlgorithmSpec::new("A3", SearchConfig::a3()),
            AlgorithmSpec::new("A4", SearchConfig::a4()),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    #[default]
    InMemory,
    OnDisk(CacheConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    pub graph: GraphSource,
    pub pairs: Vec<PairSpec>,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default)]
    pub condition: Condition,
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
    /// Label of the algorithm the ratio columns are computed against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<String>,
    /// Overrides every algorithm's frontier policy when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frontier_policy: Option<FrontierPolicy>,
}

fn default_name() -> String {
    "scenario".to_string()
}

fn default_repetitions() -> u32 {
    3
}

impl Scenario {
    pub fn new(graph: GraphSource, pairs: Vec<PairSpec>, algorithms: Vec<AlgorithmSpec>) -> Self {
        Scenario {
            name: default_name(),
            graph,
            pairs,
            algorithms,
            condition: Condition::InMemory,
            repetitions: default_repetitions(),
            baseline: None,
            frontier_policy: None,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.repetitions == 0 {
            return Err(BenchError::InvalidScenario("repetitions must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(BenchError::InvalidScenario("no algorithms listed".into()));
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            if self.algorithms[..i].iter().any(|b| b.label == a.label) {
                return Err(BenchError::InvalidScenario(format!("duplicate algorithm label `{}`", a.label)));
            }
            a.config.validate().map_err(|e| BenchError::InvalidScenario(format!("{}: {e}", a.label)))?;
        }
        if let Some(base) = &self.baseline {
            if !self.algorithms.iter().any(|a| &a.label == base) {
                return Err(BenchError::InvalidScenario(format!("baseline `{base}` is not a listed algorithm")));
            }
        }
        if let Condition::OnDisk(cache) = &self.condition {
            if cache.max_cached_nodes == 0 {
                return Err(BenchError::InvalidScenario("max_cached_nodes must be at least 1".into()));
            }
        }
        Ok(())
    }

    pub(crate) fn effective_config(&self, spec: &AlgorithmSpec) -> SearchConfig {
        let mut c = spec.config.clone();
        if let Some(policy) = self.frontier_policy {
            c.frontier_policy = policy;
        }
        c.trace = false;
        c
    }

    fn resolve_paths(&mut self, base: &Path) {
        match &mut self.graph {
            GraphSource::Jsonl(p) | GraphSource::Store(p) if p.is_relative() => *p = base.join(&*p),
            _ => {}
        }
    }
}

/// Reads a scenario definition, resolving relative graph paths against the
/// file's directory.
pub fn load_scenario(path: &Path) -> Result<Scenario, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io { path: path.to_path_buf(), source })?;
    let mut scenario: Scenario =
        serde_json::from_str(&text).map_err(|e| BenchError::InvalidScenario(format!("{}: {e}", path.display())))?;
    scenario.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    scenario.validate()?;
    Ok(scenario)
}
