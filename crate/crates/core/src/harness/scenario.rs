use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::neuro::Predictors;
use crate::topology::{generate_fat_tree, Topology};
use crate::workload::{catalog_sfcrs, replicate, traffic_pattern_with, SfcRequest, TrafficPattern, TrafficVariant};

use super::Config;

/// One experiment, named `{n_sfcrs}_{scale}_{variant}_{bandwidth}_{cpu}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub n_sfcrs: usize,
    pub traffic_scale: f64,
    pub traffic_variant: TrafficVariant,
    /// MB/s.
    pub link_bandwidth: f64,
    pub host_cpu: f64,
}

impl Scenario {
    pub fn new(
        n_sfcrs: usize,
        traffic_scale: f64,
        traffic_variant: TrafficVariant,
        link_bandwidth: f64,
        host_cpu: f64,
    ) -> Result<Self> {
        let templates = catalog_sfcrs().len();
        if n_sfcrs == 0 || !n_sfcrs.is_multiple_of(templates) {
            return Err(Error::Scenario(format!(
                "request count must be a positive multiple of {templates}, got {n_sfcrs}"
            )));
        }
        for (what, v) in [
            ("traffic scale", traffic_scale),
            ("bandwidth", link_bandwidth),
            ("cpu", host_cpu),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Scenario(format!("{what} must be positive, got {v}")));
            }
        }
        Ok(Self {
            n_sfcrs,
            traffic_scale,
            traffic_variant,
            link_bandwidth,
            host_cpu,
        })
    }

    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn build(&self, cfg: &Config) -> Result<Instance> {
        let topo = generate_fat_tree(
            cfg.topology.k,
            self.host_cpu,
            self.link_bandwidth,
            cfg.topology.host_memory,
        )?
        .with_propagation_delay(cfg.topology.propagation_delay_ms);
        let templates = catalog_sfcrs();
        let requests = replicate(&templates, self.n_sfcrs / templates.len());
        let pattern = traffic_pattern_with(&cfg.workload.curve, self.traffic_variant, self.traffic_scale);
        let predictors =
            Predictors::for_topology(requests.len(), &topo, cfg.neuro.seeds).with_activation(cfg.neuro.activation);
        Ok(Instance {
            topo,
            requests,
            pattern,
            predictors,
        })
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}_{}_{}_{}_{}",
            self.n_sfcrs, self.traffic_scale, self.traffic_variant, self.link_bandwidth, self.host_cpu
        )
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('_').collect();
        let [n, scale, variant, bw, cpu] = parts[..] else {
            return Err(Error::Scenario(format!("expected 5 fields in {s:?}")));
        };
        let num = |field: &str| {
            field
                .parse::<f64>()
                .map_err(|_| Error::Scenario(format!("bad number {field:?} in {s:?}")))
        };
        let n = n
            .parse::<usize>()
            .map_err(|_| Error::Scenario(format!("bad request count {n:?} in {s:?}")))?;
        Scenario::new(n, num(scale)?, variant.parse()?, num(bw)?, num(cpu)?)
    }
}

/// Everything a run needs, built from a scenario and a config.
#[derive(Debug, Clone)]
pub struct Instance {
    pub topo: Topology,
    pub requests: Vec<SfcRequest>,
    pub pattern: TrafficPattern,
    pub predictors: Predictors,
}

/// `{32,48} x {1,2} x {A,B} x {5,10} x {0.5,1,2}` in that nesting order.
pub fn scenario_grid() -> Vec<Scenario> {
    let mut grid = Vec::with_capacity(48);
    for n in [32, 48] {
        for scale in [1.0, 2.0] {
            for variant in [TrafficVariant::A, TrafficVariant::B] {
                for bw in [5.0, 10.0] {
                    for cpu in [0.5, 1.0, 2.0] {
                        grid.push(Scenario::new(n, scale, variant, bw, cpu).expect("grid values are valid"));
                    }
                }
            }
        }
    }
    grid
}
