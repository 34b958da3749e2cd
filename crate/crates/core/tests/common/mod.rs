#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use genesis::evolution::{EvolutionConfig, GenesisProblem, HybridEngine};
use genesis::harness::{Config, Instance, Scenario};
use genesis::netsim::Evaluator;
use genesis::topology::{NodeId, Topology};

/// Hop distance by textbook Dijkstra with unit weights. Hosts other than
/// the source are terminal.
pub fn dijkstra_hops(topo: &Topology, src: NodeId, dst: NodeId) -> Option<u64> {
    let mut dist: HashMap<NodeId, u64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(src, 0);
    heap.push(Reverse((0u64, src)));
    while let Some(Reverse((d, node))) = heap.pop() {
        if node == dst {
            return Some(d);
        }
        if d > dist[&node] || (node != src && node.is_host()) {
            continue;
        }
        for (nb, _) in topo.neighbours(node).unwrap() {
            let nd = d + 1;
            if dist.get(&nb).is_none_or(|&old| nd < old) {
                dist.insert(nb, nd);
                heap.push(Reverse((nd, nb)));
            }
        }
    }
    None
}

/// Indices of points no other point dominates, by exhaustive pairwise
/// comparison (all objectives minimised).
pub fn brute_force_front(points: &[[f64; 2]]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !(0..points.len()).any(|j| {
                let (a, b) = (points[j], points[i]);
                a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1])
            })
        })
        .collect()
}

/// P(X >= wins) for X ~ Binomial(wins + losses, 1/2).
pub fn sign_test_p(wins: usize, losses: usize) -> f64 {
    let n = wins + losses;
    let mut pmf = 0.5f64.powi(n as i32);
    let mut tail = 0.0;
    for k in 0..=n {
        if k >= wins {
            tail += pmf;
        }
        pmf *= (n - k) as f64 / (k + 1) as f64;
    }
    tail
}

pub fn instance(name: &str, cfg: &Config) -> Instance {
    name.parse::<Scenario>().unwrap().build(cfg).unwrap()
}

pub fn evaluator<'a>(inst: &'a Instance, cfg: &'a Config) -> Evaluator<'a> {
    Evaluator {
        topo: &inst.topo,
        pattern: &inst.pattern,
        profile: &cfg.workload.profile,
        cfg: &cfg.netsim,
    }
}

pub fn genesis_problem<'a>(inst: &'a Instance, cfg: &Config) -> GenesisProblem<'a> {
    GenesisProblem {
        requests: &inst.requests,
        topo: &inst.topo,
        predictors: &inst.predictors,
        solver: cfg.solver,
        blx_alpha: cfg.evolution.blx_alpha,
        mutation_sigma: cfg.evolution.mutation_sigma,
    }
}

pub fn engine<'a>(
    problem: &'a GenesisProblem<'a>,
    eval: Evaluator<'a>,
    evo: EvolutionConfig,
) -> HybridEngine<'a, GenesisProblem<'a>> {
    HybridEngine {
        representation: problem,
        evaluator: eval,
        cfg: evo,
    }
}
