//! Flow-level fitness evaluation.
//!
//! Every embedded chain carries the full traffic pattern. At each timestep a
//! VNF needs `rate * cpu_per_request` CPU and every link traversal carries
//! `rate * flow_mb_per_request` MB/s. Admission checks these against host and
//! link capacities; latency then sums per-VNF processing delay and per-link
//! queueing delay.
//!
//! Two fidelity tiers share the model: the online tier uses
//! `prop_delay / (1 - U)` per link and flags congestion at `U >= 1`, the
//! surrogate linearises it to `prop_delay * (1 + U)`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::solvers::EmbeddingGraph;
use crate::topology::{LinkId, NodeId, Topology};
use crate::workload::{TrafficPattern, VnfProfile};

const CAPACITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetsimConfig {
    /// Processing delay of a VNF holding a full CPU, ms.
    pub base_processing_ms: f64,
    /// MB carried per request.
    pub flow_mb_per_request: f64,
    /// Latency reported for congested or empty embeddings, ms.
    pub congestion_penalty_ms: f64,
}

impl Default for NetsimConfig {
    fn default() -> Self {
        Self {
            base_processing_ms: 1.0,
            flow_mb_per_request: 0.01,
            congestion_penalty_ms: 10_000.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvaluationMode {
    Surrogate,
    Online,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationResult {
    pub acceptance_ratio: f64,
    pub accepted: usize,
    pub total: usize,
    /// Mean over accepted chains of their traffic-weighted latency, ms.
    pub avg_latency: f64,
    pub per_sfc_latency: Vec<f64>,
    pub mode: EvaluationMode,
    pub congested: bool,
}

impl EvaluationResult {
    pub fn meets(&self, min_acceptance_ratio: f64, max_avg_latency: f64) -> bool {
        self.acceptance_ratio >= min_acceptance_ratio && self.avg_latency <= max_avg_latency
    }
}

/// Per-timestep resource usage.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceLedger {
    /// `[timestep][host]`, CPU units.
    pub host_cpu_used: Vec<Vec<f64>>,
    /// `[timestep][link]`, MB/s.
    pub link_bw_used: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Host {
        timestep: usize,
        host: NodeId,
        used: f64,
        capacity: f64,
    },
    Link {
        timestep: usize,
        link: LinkId,
        used: f64,
        capacity: f64,
    },
}

fn within(used: f64, capacity: f64) -> bool {
    used <= capacity * (1.0 + CAPACITY_SLACK) + CAPACITY_SLACK
}

impl ResourceLedger {
    pub fn new(topo: &Topology, timesteps: usize) -> Self {
        Self {
            host_cpu_used: vec![vec![0.0; topo.n_hosts()]; timesteps],
            link_bw_used: vec![vec![0.0; topo.links().len()]; timesteps],
        }
    }

    fn apply(
        &mut self,
        eg: &EmbeddingGraph,
        topo: &Topology,
        pattern: &TrafficPattern,
        profile: &VnfProfile,
        cfg: &NetsimConfig,
        sign: f64,
    ) {
        for (t, rate) in pattern.rates().enumerate() {
            for (kind, host) in eg.placed() {
                self.host_cpu_used[t][host.index] += sign * rate * profile.cpu_per_request(kind);
            }
            for link in eg.link_traversals(topo) {
                self.link_bw_used[t][link] += sign * rate * cfg.flow_mb_per_request;
            }
        }
    }

    pub fn add(
        &mut self,
        eg: &EmbeddingGraph,
        topo: &Topology,
        pattern: &TrafficPattern,
        profile: &VnfProfile,
        cfg: &NetsimConfig,
    ) {
        self.apply(eg, topo, pattern, profile, cfg, 1.0);
    }

    pub fn remove(
        &mut self,
        eg: &EmbeddingGraph,
        topo: &Topology,
        pattern: &TrafficPattern,
        profile: &VnfProfile,
        cfg: &NetsimConfig,
    ) {
        self.apply(eg, topo, pattern, profile, cfg, -1.0);
    }

    pub fn violations(&self, topo: &Topology) -> Vec<Violation> {
        let mut out = Vec::new();
        for (t, hosts) in self.host_cpu_used.iter().enumerate() {
            for (h, &used) in hosts.iter().enumerate() {
                if !within(used, topo.host_cpu) {
                    out.push(Violation::Host {
                        timestep: t,
                        host: NodeId::host(h),
                        used,
                        capacity: topo.host_cpu,
                    });
                }
            }
        }
        for (t, links) in self.link_bw_used.iter().enumerate() {
            for (l, &used) in links.iter().enumerate() {
                let capacity = topo.link(l).bandwidth;
                if !within(used, capacity) {
                    out.push(Violation::Link {
                        timestep: t,
                        link: l,
                        used,
                        capacity,
                    });
                }
            }
        }
        out
    }

    pub fn fits(&self, topo: &Topology) -> bool {
        let hosts_ok = self
            .host_cpu_used
            .iter()
            .flatten()
            .all(|&used| within(used, topo.host_cpu));
        hosts_ok
            && self.link_bw_used.iter().all(|links| {
                links
                    .iter()
                    .enumerate()
                    .all(|(l, &used)| within(used, topo.link(l).bandwidth))
            })
    }
}

#[derive(Debug, Clone)]
pub struct Admission {
    /// Positions in the input slice of the admitted chains, in sfcr order.
    pub accepted: Vec<usize>,
    pub acceptance_ratio: f64,
    pub ledger: ResourceLedger,
}

/// Admits embedded chains in `sfcr_id` order while every host and link
/// stays within capacity at every timestep. With no requests the ratio is 1.
pub fn accept(
    egs: &[EmbeddingGraph],
    topo: &Topology,
    pattern: &TrafficPattern,
    profile: &VnfProfile,
    cfg: &NetsimConfig,
) -> Admission {
    let mut order: Vec<usize> = (0..egs.len()).collect();
    order.sort_by_key(|&i| egs[i].sfcr_id());

    let mut ledger = ResourceLedger::new(topo, pattern.len());
    let mut accepted = Vec::new();
    for i in order {
        let eg = &egs[i];
        if !eg.is_embedded() {
            continue;
        }
        ledger.add(eg, topo, pattern, profile, cfg);
        if ledger.fits(topo) {
            accepted.push(i);
        } else {
            ledger.remove(eg, topo, pattern, profile, cfg);
        }
    }
    let acceptance_ratio = if egs.is_empty() {
        1.0
    } else {
        accepted.len() as f64 / egs.len() as f64
    };
    Admission {
        accepted,
        acceptance_ratio,
        ledger,
    }
}

/// Traffic-weighted latency of one chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SfcLatency {
    pub sfcr_id: usize,
    pub processing_ms: f64,
    pub link_ms: f64,
    pub latency_ms: f64,
    pub congested: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatencyReport {
    pub per_sfc: Vec<SfcLatency>,
    pub avg_latency: f64,
    pub congested: bool,
}

fn latency_model(
    accepted: &[&EmbeddingGraph],
    topo: &Topology,
    pattern: &TrafficPattern,
    profile: &VnfProfile,
    cfg: &NetsimConfig,
    mode: EvaluationMode,
) -> LatencyReport {
    let mut ledger = ResourceLedger::new(topo, pattern.len());
    for eg in accepted {
        ledger.add(eg, topo, pattern, profile, cfg);
    }
    let traversals: Vec<Vec<LinkId>> = accepted.iter().map(|eg| eg.link_traversals(topo).collect()).collect();

    let total_rate: f64 = pattern.rates().sum();
    let mut per_sfc = Vec::with_capacity(accepted.len());
    for (eg, links) in accepted.iter().zip(&traversals) {
        let mut processing = 0.0;
        let mut link_delay = 0.0;
        let mut congested = false;
        for (t, rate) in pattern.rates().enumerate() {
            let mut proc_t = 0.0;
            for (kind, host) in eg.placed() {
                let demand = rate * profile.cpu_per_request(kind);
                let host_demand = ledger.host_cpu_used[t][host.index];
                let share = if host_demand > 0.0 {
                    (topo.host_cpu * demand / host_demand).min(1.0)
                } else {
                    topo.host_cpu.min(1.0)
                };
                proc_t += cfg.base_processing_ms / share;
            }
            let mut link_t = 0.0;
            for &l in links {
                let link = topo.link(l);
                let utilisation = ledger.link_bw_used[t][l] / link.bandwidth;
                link_t += match mode {
                    EvaluationMode::Online => {
                        if utilisation >= 1.0 {
                            congested = true;
                            0.0
                        } else {
                            link.propagation_delay / (1.0 - utilisation)
                        }
                    }
                    EvaluationMode::Surrogate => link.propagation_delay * (1.0 + utilisation),
                };
            }
            processing += rate * proc_t;
            link_delay += rate * link_t;
        }
        let (processing_ms, link_ms) = if total_rate > 0.0 {
            (processing / total_rate, link_delay / total_rate)
        } else {
            (0.0, 0.0)
        };
        let latency_ms = if congested {
            cfg.congestion_penalty_ms
        } else {
            processing_ms + link_ms
        };
        per_sfc.push(SfcLatency {
            sfcr_id: eg.sfcr_id(),
            processing_ms,
            link_ms,
            latency_ms,
            congested,
        });
    }

    let congested = per_sfc.iter().any(|s| s.congested);
    let avg_latency = if congested || per_sfc.is_empty() {
        cfg.congestion_penalty_ms
    } else {
        per_sfc.iter().map(|s| s.latency_ms).sum::<f64>() / per_sfc.len() as f64
    };
    LatencyReport {
        per_sfc,
        avg_latency,
        congested,
    }
}

/// Full model: `prop_delay / (1 - U)` per link.
pub fn simulate_latency(
    accepted: &[&EmbeddingGraph],
    topo: &Topology,
    pattern: &TrafficPattern,
    profile: &VnfProfile,
    cfg: &NetsimConfig,
) -> LatencyReport {
    latency_model(accepted, topo, pattern, profile, cfg, EvaluationMode::Online)
}

/// Linearised model: `prop_delay * (1 + U)` per link, never congested.
pub fn surrogate_latency(
    accepted: &[&EmbeddingGraph],
    topo: &Topology,
    pattern: &TrafficPattern,
    profile: &VnfProfile,
    cfg: &NetsimConfig,
) -> LatencyReport {
    latency_model(accepted, topo, pattern, profile, cfg, EvaluationMode::Surrogate)
}

/// Everything needed to score a set of embeddings.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a> {
    pub topo: &'a Topology,
    pub pattern: &'a TrafficPattern,
    pub profile: &'a VnfProfile,
    pub cfg: &'a NetsimConfig,
}

impl Evaluator<'_> {
    pub fn evaluate(&self, egs: &[EmbeddingGraph], mode: EvaluationMode) -> EvaluationResult {
        self.evaluate_detailed(egs, mode).0
    }

    pub fn evaluate_detailed(&self, egs: &[EmbeddingGraph], mode: EvaluationMode) -> (EvaluationResult, LatencyReport) {
        let admission = accept(egs, self.topo, self.pattern, self.profile, self.cfg);
        let accepted: Vec<&EmbeddingGraph> = admission.accepted.iter().map(|&i| &egs[i]).collect();
        let report = latency_model(&accepted, self.topo, self.pattern, self.profile, self.cfg, mode);
        let avg_latency = if egs.is_empty() { 0.0 } else { report.avg_latency };
        let result = EvaluationResult {
            acceptance_ratio: admission.acceptance_ratio,
            accepted: accepted.len(),
            total: egs.len(),
            avg_latency,
            per_sfc_latency: report.per_sfc.iter().map(|s| s.latency_ms).collect(),
            mode,
            congested: report.congested,
        };
        (result, report)
    }
}

pub fn write_latency_csv<W: Write>(report: &LatencyReport, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in &report.per_sfc {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}
