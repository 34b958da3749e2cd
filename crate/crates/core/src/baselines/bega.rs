//! Binary-encoded GA: one row per VNF instance, one column per host.
//!
//! Chains keep their template order and routes are fewest-hop paths, so
//! only VNF placement evolves. The variation operators are a standard
//! binary-GA reconstruction: two-point row-wise crossover, uniform bit
//! flips at rate `1 / size`, and one-hot row repair.

use std::cmp::Ordering;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evolution::Representation;
use crate::solvers::{route_shortest, EmbeddingGraph, ForwardingGraph, PartialEmbeddingGraph, SolverConfig};
use crate::topology::{NodeId, Topology};
use crate::workload::SfcRequest;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryGenome {
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub bits: Vec<bool>,
}

impl BinaryGenome {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn row(&self, r: usize) -> &[bool] {
        &self.bits[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [bool] {
        &mut self.bits[r * self.cols..(r + 1) * self.cols]
    }

    /// Column of the single set bit of each row.
    pub fn hosts(&self) -> Option<Vec<usize>> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                match row.iter().filter(|&&b| b).count() {
                    1 => row.iter().position(|&b| b),
                    _ => None,
                }
            })
            .collect()
    }

    pub fn is_one_hot(&self) -> bool {
        self.hosts().is_some()
    }

    pub fn repair<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for r in 0..self.rows {
            repair_row(self.row_mut(r), rng);
        }
    }
}

/// Keeps one uniformly chosen set bit, or sets a uniform random bit when
/// the row is empty.
pub fn repair_row<R: Rng + ?Sized>(row: &mut [bool], rng: &mut R) {
    if row.is_empty() {
        return;
    }
    let set: Vec<usize> = (0..row.len()).filter(|&c| row[c]).collect();
    let keep = if set.is_empty() {
        rng.random_range(0..row.len())
    } else {
        set[rng.random_range(0..set.len())]
    };
    row.iter_mut().for_each(|b| *b = false);
    row[keep] = true;
}

pub struct BegaProblem<'a> {
    pub requests: &'a [SfcRequest],
    pub topo: &'a Topology,
    pub solver: SolverConfig,
    rows: usize,
}

impl<'a> BegaProblem<'a> {
    pub fn new(requests: &'a [SfcRequest], topo: &'a Topology, solver: SolverConfig) -> Self {
        let rows = requests.iter().map(|r| r.vnfs.len()).sum();
        Self {
            requests,
            topo,
            solver,
            rows,
        }
    }

    /// `(rows, cols)` of every genome.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.topo.n_hosts())
    }
}

impl Representation for BegaProblem<'_> {
    type Genome = BinaryGenome;

    fn random_genome(&self, rng: &mut ChaCha8Rng) -> BinaryGenome {
        let (rows, cols) = self.shape();
        let mut g = BinaryGenome::zeros(rows, cols);
        g.bits.iter_mut().for_each(|b| *b = rng.random_bool(0.5));
        g.repair(rng);
        g
    }

    fn crossover(&self, a: &BinaryGenome, b: &BinaryGenome, rng: &mut ChaCha8Rng) -> (BinaryGenome, BinaryGenome) {
        let (mut c1, mut c2) = (a.clone(), b.clone());
        if a.rows < 2 {
            return (c1, c2);
        }
        let mut lo = rng.random_range(0..=a.rows);
        let mut hi = rng.random_range(0..=a.rows);
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
        let span = lo * a.cols..hi * a.cols;
        c1.bits[span.clone()].copy_from_slice(&b.bits[span.clone()]);
        c2.bits[span.clone()].copy_from_slice(&a.bits[span]);
        (c1, c2)
    }

    fn mutate(&self, genome: &mut BinaryGenome, rng: &mut ChaCha8Rng) {
        let rate = 1.0 / genome.bits.len().max(1) as f64;
        for b in &mut genome.bits {
            if rng.random_bool(rate) {
                *b = !*b;
            }
        }
        genome.repair(rng);
    }

    fn decode(&self, genome: &BinaryGenome, _decode_seed: u64) -> Result<Vec<EmbeddingGraph>> {
        let hosts = genome
            .hosts()
            .ok_or_else(|| Error::Encoding("binary genome has a row without exactly one host".into()))?;
        if hosts.len() != self.rows {
            return Err(Error::Shape {
                expected: self.rows,
                got: hosts.len(),
            });
        }
        let mut next = 0;
        self.requests
            .iter()
            .map(|sfcr| {
                let fg = ForwardingGraph::in_request_order(sfcr);
                let placed: Vec<NodeId> = hosts[next..next + sfcr.vnfs.len()]
                    .iter()
                    .map(|&h| NodeId::host(h))
                    .collect();
                next += sfcr.vnfs.len();
                route_shortest(PartialEmbeddingGraph::with_hosts(fg, &placed), self.topo, &self.solver)
            })
            .collect()
    }

    fn compare(&self, a: &BinaryGenome, b: &BinaryGenome) -> Ordering {
        a.bits.cmp(&b.bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::generate_fat_tree;
    use crate::workload::{catalog_sfcrs, replicate};
    use rand::SeedableRng;

    #[test]
    fn shape_for_32_requests() {
        let topo = generate_fat_tree(4, 2.0, 10.0, 5.0).unwrap();
        let requests = replicate(&catalog_sfcrs(), 8);
        let problem = BegaProblem::new(&requests, &topo, SolverConfig::default());
        assert_eq!(problem.shape(), (96, 16));
    }

    #[test]
    fn repair_fills_empty_row() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut row = vec![false; 10];
        repair_row(&mut row, &mut rng);
        assert_eq!(row.iter().filter(|&&b| b).count(), 1);
    }

    #[test]
    fn repair_keeps_an_existing_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let mut row = vec![false, true, false, true, true];
            repair_row(&mut row, &mut rng);
            let kept = row.iter().position(|&b| b).unwrap();
            assert!([1, 3, 4].contains(&kept));
            assert_eq!(row.iter().filter(|&&b| b).count(), 1);
        }
    }

    #[test]
    fn decode_follows_template_order() {
        let topo = generate_fat_tree(4, 2.0, 10.0, 5.0).unwrap();
        let requests = replicate(&catalog_sfcrs(), 1);
        let problem = BegaProblem::new(&requests, &topo, SolverConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = problem.random_genome(&mut rng);
        let egs = problem.decode(&g, 0).unwrap();
        for (eg, sfcr) in egs.iter().zip(&requests) {
            assert!(eg.is_embedded());
            assert_eq!(eg.peg.fg.kinds().collect::<Vec<_>>(), sfcr.vnfs);
        }
    }
}
