//! Greedy embedding in arrival order.
//!
//! Each VNF goes to the host with the most remaining CPU that still fits
//! its peak demand (lowest index on ties). Consecutive stops are joined by
//! fewest-hop paths over links with enough remaining bandwidth for the
//! peak flow. A request that fails any step is rejected and its
//! reservations are released.

use crate::error::Result;
use crate::netsim::{EvaluationMode, EvaluationResult, Evaluator, LatencyReport};
use crate::solvers::{
    shortest_hop_path, EmbeddingGraph, EmbeddingStatus, ForwardingGraph, PartialEmbeddingGraph, SolverConfig,
};
use crate::topology::{NodeId, Topology};
use crate::workload::{SfcRequest, TrafficPattern, VnfProfile};

const SLACK: f64 = 1e-9;

/// Remaining peak-time capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyState {
    pub host_cpu: Vec<f64>,
    pub link_bw: Vec<f64>,
}

impl GreedyState {
    pub fn new(topo: &Topology) -> Self {
        Self {
            host_cpu: vec![topo.host_cpu; topo.n_hosts()],
            link_bw: topo.links().iter().map(|l| l.bandwidth).collect(),
        }
    }

    fn best_host(&self, demand: f64) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (h, &left) in self.host_cpu.iter().enumerate() {
            if left + SLACK < demand {
                continue;
            }
            if best.is_none_or(|b| left > self.host_cpu[b]) {
                best = Some(h);
            }
        }
        best
    }
}

#[derive(Debug, Clone)]
pub struct GdaOutcome {
    pub egs: Vec<EmbeddingGraph>,
    pub state: GreedyState,
    pub fitness: EvaluationResult,
    pub latency: LatencyReport,
    /// Always one: the final online evaluation.
    pub evaluations: usize,
}

fn embed_one(
    sfcr: &SfcRequest,
    topo: &Topology,
    peak: f64,
    profile: &VnfProfile,
    flow: f64,
    solver: &SolverConfig,
    state: &mut GreedyState,
) -> Result<Option<EmbeddingGraph>> {
    let fg = ForwardingGraph::in_request_order(sfcr);
    let mut hosts = Vec::with_capacity(sfcr.vnfs.len());
    for &kind in &sfcr.vnfs {
        let demand = peak * profile.cpu_per_request(kind);
        let Some(h) = state.best_host(demand) else {
            return Ok(None);
        };
        state.host_cpu[h] -= demand;
        hosts.push(NodeId::host(h));
    }

    let mut stops = vec![solver.ingress];
    stops.extend(&hosts);
    stops.push(solver.egress);
    let mut paths = Vec::with_capacity(stops.len() - 1);
    for w in stops.windows(2) {
        let usable = |l: usize| state.link_bw[l] + SLACK >= flow;
        let Some(path) = shortest_hop_path(topo, w[0], w[1], usable)? else {
            return Ok(None);
        };
        for pair in path.windows(2) {
            if let Some(l) = topo.link_between(pair[0], pair[1]) {
                state.link_bw[l] -= flow;
            }
        }
        paths.push(path);
    }
    Ok(Some(EmbeddingGraph {
        peg: PartialEmbeddingGraph::with_hosts(fg, &hosts),
        paths,
        status: EmbeddingStatus::Embedded,
    }))
}

pub fn gda_embed(
    requests: &[SfcRequest],
    topo: &Topology,
    pattern: &TrafficPattern,
    profile: &VnfProfile,
    evaluator: &Evaluator<'_>,
    solver: &SolverConfig,
) -> Result<GdaOutcome> {
    let peak = pattern.peak_rate();
    let flow = peak * evaluator.cfg.flow_mb_per_request;
    let mut order: Vec<&SfcRequest> = requests.iter().collect();
    order.sort_by_key(|r| r.arrival_rank);

    let mut state = GreedyState::new(topo);
    let mut egs = Vec::with_capacity(requests.len());
    for sfcr in order {
        let snapshot = state.clone();
        match embed_one(sfcr, topo, peak, profile, flow, solver, &mut state)? {
            Some(eg) => egs.push(eg),
            None => {
                state = snapshot;
                let fg = ForwardingGraph::in_request_order(sfcr);
                let placements = fg
                    .ordered_vnfs
                    .iter()
                    .map(|v| crate::solvers::PlacedVnf {
                        kind: v.kind,
                        instance: v.instance,
                        host: None,
                    })
                    .collect();
                egs.push(EmbeddingGraph::rejected(PartialEmbeddingGraph {
                    fg,
                    placements,
                    mean_hosts: Vec::new(),
                }));
            }
        }
    }
    let (fitness, latency) = evaluator.evaluate_detailed(&egs, EvaluationMode::Online);
    Ok(GdaOutcome {
        egs,
        state,
        fitness,
        latency,
        evaluations: 1,
    })
}
