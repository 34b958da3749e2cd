//! k-ary fat-tree substrate.
//!
//! Nodes are stored densely in `(kind, index)` order: hosts first, then
//! edge, aggregation and core switches. The dense position doubles as the
//! one-hot slot used by the link cost predictor.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default per-link propagation delay in milliseconds.
pub const DEFAULT_PROPAGATION_DELAY_MS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Host,
    EdgeSwitch,
    AggSwitch,
    CoreSwitch,
}

impl NodeKind {
    fn prefix(self) -> char {
        match self {
            NodeKind::Host => 'h',
            NodeKind::EdgeSwitch => 'e',
            NodeKind::AggSwitch => 'a',
            NodeKind::CoreSwitch => 'c',
        }
    }
}

/// A node of the substrate, ordered by kind then index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub kind: NodeKind,
    pub index: usize,
}

impl NodeId {
    pub const fn host(index: usize) -> Self {
        Self {
            kind: NodeKind::Host,
            index,
        }
    }

    pub const fn edge(index: usize) -> Self {
        Self {
            kind: NodeKind::EdgeSwitch,
            index,
        }
    }

    pub const fn agg(index: usize) -> Self {
        Self {
            kind: NodeKind::AggSwitch,
            index,
        }
    }

    pub const fn core(index: usize) -> Self {
        Self {
            kind: NodeKind::CoreSwitch,
            index,
        }
    }

    pub fn is_host(&self) -> bool {
        self.kind == NodeKind::Host
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.index)
    }
}

impl FromStr for NodeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let kind = match chars.next() {
            Some('h') => NodeKind::Host,
            Some('e') => NodeKind::EdgeSwitch,
            Some('a') => NodeKind::AggSwitch,
            Some('c') => NodeKind::CoreSwitch,
            _ => return Err(Error::NodeNotFound(s.to_string())),
        };
        let index = chars.as_str().parse().map_err(|_| Error::NodeNotFound(s.to_string()))?;
        Ok(NodeId { kind, index })
    }
}

impl Serialize for NodeId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub type LinkId = usize;

/// Undirected link, stored once and traversable both ways.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub endpoints: (NodeId, NodeId),
    /// MB/s.
    pub bandwidth: f64,
    /// Milliseconds.
    pub propagation_delay: f64,
}

impl Link {
    pub fn other(&self, node: NodeId) -> Option<NodeId> {
        match self.endpoints {
            (a, b) if a == node => Some(b),
            (a, b) if b == node => Some(a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Topology {
    pub k: usize,
    /// CPU units per host.
    pub host_cpu: f64,
    /// GB per host. Carried for completeness, never constrains placement.
    pub host_memory: f64,
    nodes: Vec<NodeId>,
    links: Vec<Link>,
    /// Dense node position -> sorted (neighbour position, link).
    adjacency: Vec<Vec<(usize, LinkId)>>,
    counts: [usize; 4],
}

impl Topology {
    pub fn n_hosts(&self) -> usize {
        self.counts[0]
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.counts[kind as usize]
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id]
    }

    pub fn hosts(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.n_hosts()).map(NodeId::host)
    }

    /// Dense position of a node, which is also its one-hot slot.
    pub fn position(&self, node: NodeId) -> Result<usize> {
        let kind = node.kind as usize;
        if node.index >= self.counts[kind] {
            return Err(Error::NodeNotFound(node.to_string()));
        }
        Ok(self.counts[..kind].iter().sum::<usize>() + node.index)
    }

    pub fn node_at(&self, position: usize) -> NodeId {
        self.nodes[position]
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.position(node).is_ok()
    }

    /// Nodes sharing a link with `node`, sorted by kind then index.
    pub fn neighbours(&self, node: NodeId) -> Result<Vec<(NodeId, &Link)>> {
        let pos = self.position(node)?;
        Ok(self.adjacency[pos]
            .iter()
            .map(|&(nb, link)| (self.nodes[nb], &self.links[link]))
            .collect())
    }

    /// Adjacency by dense position, for hot loops.
    pub(crate) fn adjacent(&self, position: usize) -> &[(usize, LinkId)] {
        &self.adjacency[position]
    }

    pub fn link_between(&self, a: NodeId, b: NodeId) -> Option<LinkId> {
        let pa = self.position(a).ok()?;
        let pb = self.position(b).ok()?;
        self.adjacency[pa]
            .iter()
            .find(|&&(nb, _)| nb == pb)
            .map(|&(_, link)| link)
    }

    /// The edge switch a host hangs off.
    pub fn edge_of(&self, host: NodeId) -> Result<NodeId> {
        if !host.is_host() {
            return Err(Error::NodeNotFound(host.to_string()));
        }
        self.position(host)?;
        Ok(NodeId::edge(host.index / (self.k / 2)))
    }

    /// Writes one `node_a node_b bandwidth delay` line per link.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for link in &self.links {
            let (a, b) = link.endpoints;
            writeln!(out, "{a} {b} {} {}", link.bandwidth, link.propagation_delay)?;
        }
        Ok(())
    }

    /// Sets every link's propagation delay.
    pub fn with_propagation_delay(mut self, delay_ms: f64) -> Self {
        for link in &mut self.links {
            link.propagation_delay = delay_ms;
        }
        self
    }
}

/// Builds the standard k-ary fat-tree.
///
/// Pod `p` owns edge switches `p*k/2 .. (p+1)*k/2` and the same range of
/// aggregation switches. Hosts are numbered pod-major, left to right, so
/// host `i` hangs off edge switch `i / (k/2)`. Aggregation switch `j` of
/// each pod (position within the pod) connects to core switches
/// `j*k/2 .. (j+1)*k/2`.
pub fn generate_fat_tree(k: i64, host_cpu: f64, link_bandwidth: f64, host_memory: f64) -> Result<Topology> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidArity(k));
    }
    if !(link_bandwidth > 0.0) {
        return Err(Error::InvalidCapacity(format!(
            "link bandwidth must be positive, got {link_bandwidth}"
        )));
    }
    if !(host_cpu >= 0.0) {
        return Err(Error::InvalidCapacity(format!(
            "host cpu must be non-negative, got {host_cpu}"
        )));
    }
    let k = k as usize;
    let half = k / 2;
    let n_hosts = k * k * k / 4;
    let n_edge = k * half;
    let n_agg = k * half;
    let n_core = half * half;
    let counts = [n_hosts, n_edge, n_agg, n_core];

    let mut nodes = Vec::with_capacity(n_hosts + n_edge + n_agg + n_core);
    nodes.extend((0..n_hosts).map(NodeId::host));
    nodes.extend((0..n_edge).map(NodeId::edge));
    nodes.extend((0..n_agg).map(NodeId::agg));
    nodes.extend((0..n_core).map(NodeId::core));

    let mut links = Vec::with_capacity(3 * k * k * k / 4);
    let mut connect = |a: NodeId, b: NodeId| {
        links.push(Link {
            endpoints: (a, b),
            bandwidth: link_bandwidth,
            propagation_delay: DEFAULT_PROPAGATION_DELAY_MS,
        })
    };

    for host in 0..n_hosts {
        connect(NodeId::host(host), NodeId::edge(host / half));
    }
    for pod in 0..k {
        for e in 0..half {
            for a in 0..half {
                connect(NodeId::edge(pod * half + e), NodeId::agg(pod * half + a));
            }
        }
    }
    for pod in 0..k {
        for a in 0..half {
            for c in 0..half {
                connect(NodeId::agg(pod * half + a), NodeId::core(a * half + c));
            }
        }
    }

    let mut topo = Topology {
        k,
        host_cpu,
        host_memory,
        nodes,
        links,
        adjacency: Vec::new(),
        counts,
    };
    let mut adjacency = vec![Vec::new(); topo.nodes.len()];
    for (id, link) in topo.links.iter().enumerate() {
        let pa = topo.position(link.endpoints.0)?;
        let pb = topo.position(link.endpoints.1)?;
        adjacency[pa].push((pb, id));
        adjacency[pb].push((pa, id));
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    topo.adjacency = adjacency;
    Ok(topo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fat_tree(k: i64) -> Topology {
        generate_fat_tree(k, 1.0, 10.0, 5.0).unwrap()
    }

    #[test]
    fn k4_counts() {
        let t = fat_tree(4);
        assert_eq!(t.count(NodeKind::Host), 16);
        assert_eq!(t.count(NodeKind::EdgeSwitch), 8);
        assert_eq!(t.count(NodeKind::AggSwitch), 8);
        assert_eq!(t.count(NodeKind::CoreSwitch), 4);
        assert_eq!(t.links().len(), 48);
    }

    #[test]
    fn k2_counts() {
        let t = fat_tree(2);
        assert_eq!(
            [
                NodeKind::Host,
                NodeKind::EdgeSwitch,
                NodeKind::AggSwitch,
                NodeKind::CoreSwitch
            ]
            .map(|kind| t.count(kind)),
            [2, 2, 2, 1]
        );
        assert_eq!(t.links().len(), 6);
    }

    #[test]
    fn odd_or_small_arity_rejected() {
        for k in [3, 1, 0, -2] {
            assert!(matches!(
                generate_fat_tree(k, 1.0, 10.0, 5.0),
                Err(Error::InvalidArity(_))
            ));
        }
    }

    #[test]
    fn zero_bandwidth_rejected() {
        assert!(matches!(
            generate_fat_tree(4, 1.0, 0.0, 5.0),
            Err(Error::InvalidCapacity(_))
        ));
    }

    #[test]
    fn host_is_leaf() {
        let t = fat_tree(4);
        let nbs = t.neighbours(NodeId::host(0)).unwrap();
        assert_eq!(nbs.len(), 1);
        assert_eq!(nbs[0].0, NodeId::edge(0));
    }

    #[test]
    fn core_has_one_agg_per_pod() {
        let t = fat_tree(4);
        for c in 0..4 {
            let nbs = t.neighbours(NodeId::core(c)).unwrap();
            assert_eq!(nbs.len(), 4);
            let pods: Vec<usize> = nbs.iter().map(|(n, _)| n.index / 2).collect();
            assert_eq!(pods, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn unknown_node_not_found() {
        let t = fat_tree(4);
        assert!(matches!(t.neighbours(NodeId::host(16)), Err(Error::NodeNotFound(_))));
        assert!(matches!(t.neighbours(NodeId::core(4)), Err(Error::NodeNotFound(_))));
        assert!("".parse::<NodeId>().is_err());
    }

    #[test]
    fn neighbours_sorted() {
        let t = fat_tree(4);
        for &n in t.nodes() {
            let nbs: Vec<NodeId> = t.neighbours(n).unwrap().into_iter().map(|(n, _)| n).collect();
            let mut sorted = nbs.clone();
            sorted.sort();
            assert_eq!(nbs, sorted);
        }
    }

    #[test]
    fn node_id_round_trips_through_text() {
        for s in ["h0", "e7", "a3", "c12"] {
            assert_eq!(s.parse::<NodeId>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn edge_list_dump() {
        let t = fat_tree(2);
        let mut buf = Vec::new();
        t.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], "h0 e0 10 0.1");
        assert_eq!(lines[5], "a1 c0 10 0.1");
    }
}
