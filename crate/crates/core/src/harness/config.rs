use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::EvolutionConfig;
use crate::netsim::NetsimConfig;
use crate::neuro::{Activation, PredictorSeeds};
use crate::solvers::SolverConfig;
use crate::topology::DEFAULT_PROPAGATION_DELAY_MS;
use crate::workload::{DiurnalCurve, VnfProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TopologyConfig {
    pub k: i64,
    pub host_memory: f64,
    pub propagation_delay_ms: f64,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        Self {
            k: 4,
            host_memory: 5.0,
            propagation_delay_ms: DEFAULT_PROPAGATION_DELAY_MS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct WorkloadConfig {
    pub curve: DiurnalCurve,
    pub profile: VnfProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NeuroConfig {
    pub activation: Activation,
    pub seeds: PredictorSeeds,
}

impl Default for NeuroConfig {
    fn default() -> Self {
        Self {
            activation: Activation::Sine,
            seeds: PredictorSeeds::default(),
        }
    }
}

/// Every tunable constant, loadable from TOML. Missing keys keep their
/// defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub topology: TopologyConfig,
    pub workload: WorkloadConfig,
    pub neuro: NeuroConfig,
    pub solver: SolverConfig,
    pub netsim: NetsimConfig,
    pub evolution: EvolutionConfig,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.evolution.validate()?;
        self.workload.profile.validate()?;
        if !(self.solver.sigma > 0.0) {
            return Err(Error::Config(format!(
                "sigma must be positive, got {}",
                self.solver.sigma
            )));
        }
        if !(self.topology.propagation_delay_ms >= 0.0) {
            return Err(Error::Config("propagation delay must be non-negative".into()));
        }
        if self.workload.curve.period == 0 {
            return Err(Error::Config("traffic period must be positive".into()));
        }
        Ok(())
    }
}
