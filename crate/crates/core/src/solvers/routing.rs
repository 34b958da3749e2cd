//! Path search between VNF hosts: the predictor-guided best-first search
//! used by the evolved solver, and plain hop-count shortest paths used by
//! the baselines.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::neuro::{Genome, Predictors};
use crate::topology::{LinkId, NodeId, Topology};

use super::{EmbeddingGraph, EmbeddingStatus, PartialEmbeddingGraph, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
struct OpenKey {
    total: f64,
    position: usize,
}

impl Eq for OpenKey {}

impl PartialOrd for OpenKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpenKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total
            .total_cmp(&other.total)
            .then(self.position.cmp(&other.position))
    }
}

/// Best-first search ordered by `cost_from_src + cost_to_dst`.
///
/// `cost(a, b)` is queried both for the edge `curr -> nb` and for the
/// estimate `nb -> dst`, with nodes given as dense positions. Only the
/// source and switches are expanded, so paths never transit a host. A
/// closed node is re-opened when reached with a strictly lower total.
/// Equal totals pop the lowest `(kind, index)` node first.
pub fn a_star<F>(topo: &Topology, src: NodeId, dst: NodeId, mut cost: F) -> Result<Vec<NodeId>>
where
    F: FnMut(usize, usize) -> Result<f64>,
{
    let src_pos = topo.position(src)?;
    let dst_pos = topo.position(dst)?;
    if src_pos == dst_pos {
        return Ok(vec![src]);
    }

    let n = topo.n_nodes();
    let mut from_src = vec![f64::INFINITY; n];
    let mut total = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut closed = vec![false; n];
    let mut open = BTreeSet::new();

    from_src[src_pos] = 0.0;
    total[src_pos] = 0.0;
    open.insert(OpenKey {
        total: 0.0,
        position: src_pos,
    });

    let mut expanded = 0usize;
    while let Some(key) = open.pop_first() {
        let curr = key.position;
        if curr == dst_pos {
            return trace(topo, &parent, src_pos, dst_pos);
        }
        if expanded == 0 || !topo.node_at(curr).is_host() {
            for &(nb, _) in topo.adjacent(curr) {
                let to_dst = cost(nb, dst_pos)?;
                let step = cost(curr, nb)?;
                let g = from_src[curr] + step;
                let t = g + to_dst;
                if !(t < total[nb]) {
                    continue;
                }
                if closed[nb] {
                    closed[nb] = false;
                } else if total[nb].is_finite() {
                    open.remove(&OpenKey {
                        total: total[nb],
                        position: nb,
                    });
                }
                from_src[nb] = g;
                total[nb] = t;
                parent[nb] = Some(curr);
                open.insert(OpenKey { total: t, position: nb });
            }
        }
        expanded += 1;
        closed[curr] = true;
    }
    Err(Error::Unreachable { src, dst })
}

fn trace(topo: &Topology, parent: &[Option<usize>], src: usize, dst: usize) -> Result<Vec<NodeId>> {
    let mut path = vec![topo.node_at(dst)];
    let mut at = dst;
    while at != src {
        at = parent[at].ok_or(Error::Unreachable {
            src: topo.node_at(src),
            dst: topo.node_at(dst),
        })?;
        path.push(topo.node_at(at));
        if path.len() > topo.n_nodes() {
            return Err(Error::Unreachable {
                src: topo.node_at(src),
                dst: topo.node_at(dst),
            });
        }
    }
    path.reverse();
    Ok(path)
}

/// Fewest-hop path over links accepted by `usable`. Neighbours are scanned
/// in `(kind, index)` order and the first discovery wins, so ties go to
/// the lowest-numbered intermediate switches. Hosts other than `src` are
/// never transited.
pub fn shortest_hop_path<F>(topo: &Topology, src: NodeId, dst: NodeId, usable: F) -> Result<Option<Vec<NodeId>>>
where
    F: Fn(LinkId) -> bool,
{
    let src_pos = topo.position(src)?;
    let dst_pos = topo.position(dst)?;
    if src_pos == dst_pos {
        return Ok(Some(vec![src]));
    }
    let mut parent: Vec<Option<usize>> = vec![None; topo.n_nodes()];
    let mut seen = vec![false; topo.n_nodes()];
    seen[src_pos] = true;
    let mut queue = VecDeque::from([src_pos]);
    while let Some(curr) = queue.pop_front() {
        if curr == dst_pos {
            return trace(topo, &parent, src_pos, dst_pos).map(Some);
        }
        if curr != src_pos && topo.node_at(curr).is_host() {
            continue;
        }
        for &(nb, link) in topo.adjacent(curr) {
            if !seen[nb] && usable(link) {
                seen[nb] = true;
                parent[nb] = Some(curr);
                queue.push_back(nb);
            }
        }
    }
    Ok(None)
}

/// Node sequence of every segment an embedded chain must route: ingress to
/// the first VNF host, host to host, last host to egress.
pub(crate) fn segments(peg: &PartialEmbeddingGraph, cfg: &SolverConfig) -> Option<Vec<(NodeId, NodeId)>> {
    let hosts: Vec<NodeId> = peg.placements.iter().map(|p| p.host).collect::<Option<_>>()?;
    let mut stops = Vec::with_capacity(hosts.len() + 2);
    stops.push(cfg.ingress);
    stops.extend(hosts);
    stops.push(cfg.egress);
    Some(stops.windows(2).map(|w| (w[0], w[1])).collect())
}

pub fn embed_links(
    peg: &PartialEmbeddingGraph,
    predictors: &Predictors,
    genome: &Genome,
    topo: &Topology,
    cfg: &SolverConfig,
) -> Result<EmbeddingGraph> {
    let Some(segments) = segments(peg, cfg) else {
        return Ok(EmbeddingGraph::rejected(peg.clone()));
    };
    let peg_id = peg.fg.sfcr_id;
    let mut paths = Vec::with_capacity(segments.len());
    for (src, dst) in segments {
        let path = a_star(topo, src, dst, |a, b| {
            Ok(1.0 + predictors.link_heuristic(genome, peg_id, a, b)?)
        })?;
        paths.push(path);
    }
    Ok(EmbeddingGraph {
        peg: peg.clone(),
        paths,
        status: EmbeddingStatus::Embedded,
    })
}
