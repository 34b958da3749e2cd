//! VNF placement from the predicted mean host.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::neuro::{Genome, Predictors};
use crate::topology::NodeId;

use super::{ForwardingGraph, PartialEmbeddingGraph, PlacedVnf};

/// Maps a Gaussian draw to a host index: floor, reduce modulo `n_hosts`,
/// shift negative remainders up by `n_hosts`.
pub fn host_from_sample(sample: f64, n_hosts: usize) -> usize {
    let n = n_hosts as i64;
    let mut host = sample.floor() as i64 % n;
    if host < 0 {
        host += n;
    }
    host as usize
}

pub fn embed_vnfs<R: Rng + ?Sized>(
    fg: &ForwardingGraph,
    predictors: &Predictors,
    genome: &Genome,
    n_hosts: usize,
    sigma: f64,
    rng: &mut R,
) -> Result<PartialEmbeddingGraph> {
    if n_hosts == 0 {
        return Err(Error::Config("cannot place VNFs without hosts".into()));
    }
    if !(sigma > 0.0) {
        return Err(Error::Config(format!("placement sigma must be positive, got {sigma}")));
    }
    let mut placements = Vec::with_capacity(fg.ordered_vnfs.len());
    let mut mean_hosts = Vec::with_capacity(fg.ordered_vnfs.len());
    for vnf in &fg.ordered_vnfs {
        let mean_host = predictors.mean_host(genome, fg.sfcr_id, vnf.kind, vnf.instance as i64)?;
        let host = if mean_host > 0.0 {
            let normal = Normal::new(mean_host, sigma).map_err(|e| Error::Config(e.to_string()))?;
            Some(NodeId::host(host_from_sample(normal.sample(rng), n_hosts)))
        } else {
            None
        };
        placements.push(PlacedVnf {
            kind: vnf.kind,
            instance: vnf.instance,
            host,
        });
        mean_hosts.push(mean_host);
    }
    Ok(PartialEmbeddingGraph {
        fg: fg.clone(),
        placements,
        mean_hosts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn in_range_sample() {
        assert_eq!(host_from_sample(7.9, 16), 7);
        assert_eq!(host_from_sample(0.0, 16), 0);
    }

    #[test]
    fn negative_sample_wraps() {
        // floor(-1.2) = -2, -2 % 16 = -2 in remainder arithmetic, + 16 = 14
        assert_eq!(host_from_sample(-1.2, 16), 14);
        assert_eq!(host_from_sample(-16.0, 16), 0);
    }

    #[test]
    fn overflow_sample_wraps() {
        assert_eq!(host_from_sample(17.5, 16), 1);
        assert_eq!(host_from_sample(16.0, 16), 0);
    }
}
