//! Decoding a genome into embedding graphs.
//!
//! Each request passes through three stages: chain composition produces a
//! [`ForwardingGraph`], VNF placement a [`PartialEmbeddingGraph`], and link
//! embedding the final [`EmbeddingGraph`].

mod chain;
mod placement;
mod routing;

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use chain::{compose_chain, order_chain};
pub use placement::{embed_vnfs, host_from_sample};
pub use routing::{a_star, embed_links, shortest_hop_path};

use crate::error::Result;
use crate::neuro::{Genome, Predictors};
use crate::topology::{LinkId, NodeId, Topology};
use crate::workload::{SfcRequest, VnfKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Standard deviation of the placement Gaussian.
    pub sigma: f64,
    pub ingress: NodeId,
    pub egress: NodeId,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            sigma: 2.0,
            ingress: NodeId::edge(0),
            egress: NodeId::edge(0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainedVnf {
    pub kind: VnfKind,
    pub instance: u32,
    pub priority: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardingGraph {
    pub sfcr_id: usize,
    pub ordered_vnfs: Vec<ChainedVnf>,
}

impl ForwardingGraph {
    /// The request's VNFs in listed order, all at priority 0.
    pub fn in_request_order(sfcr: &SfcRequest) -> Self {
        Self {
            sfcr_id: sfcr.id,
            ordered_vnfs: sfcr
                .vnfs
                .iter()
                .map(|&kind| ChainedVnf {
                    kind,
                    instance: 1,
                    priority: 0.0,
                })
                .collect(),
        }
    }

    pub fn kinds(&self) -> impl Iterator<Item = VnfKind> + '_ {
        self.ordered_vnfs.iter().map(|v| v.kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacedVnf {
    pub kind: VnfKind,
    pub instance: u32,
    /// `None` when the placement was rejected.
    pub host: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialEmbeddingGraph {
    pub fg: ForwardingGraph,
    pub placements: Vec<PlacedVnf>,
    pub mean_hosts: Vec<f64>,
}

impl PartialEmbeddingGraph {
    pub fn with_hosts(fg: ForwardingGraph, hosts: &[NodeId]) -> Self {
        let placements = fg
            .ordered_vnfs
            .iter()
            .zip(hosts)
            .map(|(v, &host)| PlacedVnf {
                kind: v.kind,
                instance: v.instance,
                host: Some(host),
            })
            .collect();
        Self {
            placements,
            mean_hosts: Vec::new(),
            fg,
        }
    }

    pub fn is_rejected(&self) -> bool {
        self.placements.iter().any(|p| p.host.is_none())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmbeddingStatus {
    Embedded,
    Rejected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingGraph {
    pub peg: PartialEmbeddingGraph,
    /// Ingress to first host, each consecutive host pair, last host to
    /// egress. Empty when rejected.
    pub paths: Vec<Vec<NodeId>>,
    pub status: EmbeddingStatus,
}

impl EmbeddingGraph {
    pub fn rejected(peg: PartialEmbeddingGraph) -> Self {
        Self {
            peg,
            paths: Vec::new(),
            status: EmbeddingStatus::Rejected,
        }
    }

    pub fn sfcr_id(&self) -> usize {
        self.peg.fg.sfcr_id
    }

    pub fn is_embedded(&self) -> bool {
        self.status == EmbeddingStatus::Embedded
    }

    /// `(kind, host)` of every placed VNF, in chain order.
    pub fn placed(&self) -> impl Iterator<Item = (VnfKind, NodeId)> + '_ {
        self.peg.placements.iter().filter_map(|p| p.host.map(|h| (p.kind, h)))
    }

    /// Every link traversal along the paths; a link used by two segments
    /// appears twice.
    pub fn link_traversals<'a>(&'a self, topo: &'a Topology) -> impl Iterator<Item = LinkId> + 'a {
        self.paths
            .iter()
            .flat_map(move |path| path.windows(2).filter_map(move |w| topo.link_between(w[0], w[1])))
    }
}

/// Composes, places and routes every request. The RNG drives the
/// placement Gaussian only.
pub fn decode<R: Rng + ?Sized>(
    genome: &Genome,
    requests: &[SfcRequest],
    topo: &Topology,
    predictors: &Predictors,
    cfg: &SolverConfig,
    rng: &mut R,
) -> Result<Vec<EmbeddingGraph>> {
    requests
        .iter()
        .map(|sfcr| {
            let fg = compose_chain(sfcr, predictors, genome)?;
            let peg = embed_vnfs(&fg, predictors, genome, topo.n_hosts(), cfg.sigma, rng)?;
            if peg.is_rejected() {
                Ok(EmbeddingGraph::rejected(peg))
            } else {
                embed_links(&peg, predictors, genome, topo, cfg)
            }
        })
        .collect()
}

/// Routes already placed VNFs along fewest-hop paths.
pub fn route_shortest(peg: PartialEmbeddingGraph, topo: &Topology, cfg: &SolverConfig) -> Result<EmbeddingGraph> {
    let Some(segments) = routing::segments(&peg, cfg) else {
        return Ok(EmbeddingGraph::rejected(peg));
    };
    let mut paths = Vec::with_capacity(segments.len());
    for (src, dst) in segments {
        match shortest_hop_path(topo, src, dst, |_| true)? {
            Some(path) => paths.push(path),
            None => return Err(crate::error::Error::Unreachable { src, dst }),
        }
    }
    Ok(EmbeddingGraph {
        peg,
        paths,
        status: EmbeddingStatus::Embedded,
    })
}

/// Text dump, one record per request.
pub fn write_embeddings<W: Write>(egs: &[EmbeddingGraph], mut out: W) -> Result<()> {
    for eg in egs {
        let status = match eg.status {
            EmbeddingStatus::Embedded => "embedded",
            EmbeddingStatus::Rejected => "rejected",
        };
        writeln!(out, "sfcr {} {status}", eg.sfcr_id())?;
        let order: Vec<String> = eg.peg.fg.kinds().map(|k| k.to_string()).collect();
        writeln!(out, "  order: {}", order.join(" "))?;
        let placements: Vec<String> = eg
            .peg
            .placements
            .iter()
            .map(|p| match p.host {
                Some(h) => format!("{}@{h}", p.kind),
                None => format!("{}@-", p.kind),
            })
            .collect();
        writeln!(out, "  placements: {}", placements.join(" "))?;
        for path in &eg.paths {
            let nodes: Vec<String> = path.iter().map(|n| n.to_string()).collect();
            writeln!(out, "  path: {}", nodes.join(" "))?;
        }
    }
    Ok(())
}
