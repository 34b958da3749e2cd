//! Genetic evolution with NSGA-II selection and hybrid surrogate/online
//! fitness evaluation.
//!
//! The loop scores every new individual with the surrogate model. Each
//! generation, individuals whose surrogate fitness meets both thresholds
//! are re-scored with the online model, best-ranked first; the first one
//! that also passes online ends the run. Otherwise the population breeds
//! and NSGA-II picks survivors from parents and offspring together.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt::Debug;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netsim::{EvaluationMode, EvaluationResult, Evaluator};
use crate::neuro::{Genome, Predictors, GENOME_LEN};
use crate::nsga2::{self, Objectives};
use crate::solvers::{decode, EmbeddingGraph, SolverConfig};
use crate::topology::Topology;
use crate::workload::SfcRequest;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub max_generations: usize,
    pub min_acceptance_ratio: f64,
    /// ms.
    pub max_avg_latency: f64,
    pub blx_alpha: f64,
    pub mutation_sigma: f64,
    pub seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            max_generations: 500,
            min_acceptance_ratio: 1.0,
            max_avg_latency: 100.0,
            blx_alpha: 0.5,
            mutation_sigma: PI,
            seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config(format!(
                "population size must be at least 2, got {}",
                self.population_size
            )));
        }
        if !(self.blx_alpha >= 0.0) {
            return Err(Error::Config(format!(
                "blend alpha must be non-negative, got {}",
                self.blx_alpha
            )));
        }
        if !(self.mutation_sigma > 0.0) {
            return Err(Error::Config(format!(
                "mutation sigma must be positive, got {}",
                self.mutation_sigma
            )));
        }
        Ok(())
    }
}

/// A genetic encoding the engine can breed and decode.
pub trait Representation: Sync {
    type Genome: Clone + Debug + Send + Sync;

    fn random_genome(&self, rng: &mut ChaCha8Rng) -> Self::Genome;

    fn crossover(&self, a: &Self::Genome, b: &Self::Genome, rng: &mut ChaCha8Rng) -> (Self::Genome, Self::Genome);

    fn mutate(&self, genome: &mut Self::Genome, rng: &mut ChaCha8Rng);

    /// Builds the embeddings. `decode_seed` drives any sampling so a given
    /// individual always decodes the same way.
    fn decode(&self, genome: &Self::Genome, decode_seed: u64) -> Result<Vec<EmbeddingGraph>>;

    /// Total order used to break selection ties.
    fn compare(&self, a: &Self::Genome, b: &Self::Genome) -> Ordering;
}

#[derive(Debug, Clone)]
pub struct Individual<G> {
    pub genome: G,
    pub decode_seed: u64,
    /// Surrogate fitness.
    pub fitness: Option<EvaluationResult>,
    /// Online fitness, once measured.
    pub online: Option<EvaluationResult>,
    pub rank: usize,
    pub crowding: f64,
}

impl<G> Individual<G> {
    pub fn new(genome: G, decode_seed: u64) -> Self {
        Self {
            genome,
            decode_seed,
            fitness: None,
            online: None,
            rank: 0,
            crowding: 0.0,
        }
    }

    /// `(-acceptance ratio, latency)`, both minimised.
    pub fn objectives(&self) -> Option<Objectives> {
        self.fitness.as_ref().map(|f| [-f.acceptance_ratio, f.avg_latency])
    }
}

/// Uniform genes in `[-pi, pi]`.
pub fn init_population(cfg: &EvolutionConfig) -> Vec<Individual<Genome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.population_size)
        .map(|_| {
            let genome = random_genome(&mut rng);
            Individual::new(genome, rng.next_u64())
        })
        .collect()
}

pub fn random_genome<R: Rng + ?Sized>(rng: &mut R) -> Genome {
    let mut genes = [0.0; GENOME_LEN];
    for g in &mut genes {
        *g = rng.random_range(-PI..=PI);
    }
    Genome(genes)
}

/// BLX-alpha: per gene, `child = (1 - gamma) x + gamma y` with
/// `gamma = (1 + 2 alpha) u - alpha`, `u ~ U(0, 1)`; the sibling swaps the
/// roles of `x` and `y`.
pub fn blend_crossover<R: Rng + ?Sized>(p1: &Genome, p2: &Genome, alpha: f64, rng: &mut R) -> (Genome, Genome) {
    let mut c1 = *p1;
    let mut c2 = *p2;
    for i in 0..GENOME_LEN {
        let (x, y) = (p1.0[i], p2.0[i]);
        let u: f64 = rng.random();
        let gamma = (1.0 + 2.0 * alpha) * u - alpha;
        c1.0[i] = (1.0 - gamma) * x + gamma * y;
        c2.0[i] = gamma * x + (1.0 - gamma) * y;
    }
    (c1, c2)
}

/// Adds `N(0, sigma^2)` to every gene, unclamped.
pub fn mutate<R: Rng + ?Sized>(genome: &Genome, sigma: f64, rng: &mut R) -> Genome {
    let normal = Normal::new(0.0, sigma).expect("mutation sigma must be finite and positive");
    let mut out = *genome;
    for g in &mut out.0 {
        *g += normal.sample(rng);
    }
    out
}

/// NSGA-II survivor selection. The result is ordered by rank, then
/// crowding (descending), then the representation's genome order.
pub fn nsga2_select<G: Clone>(
    pool: Vec<Individual<G>>,
    population_size: usize,
    compare: impl Fn(&G, &G) -> Ordering,
) -> Result<Vec<Individual<G>>> {
    let points = pool
        .iter()
        .enumerate()
        .map(|(i, ind)| ind.objectives().ok_or(Error::Unevaluated(i)))
        .collect::<Result<Vec<_>>>()?;
    let chosen = nsga2::select(&points, population_size, |a, b| {
        compare(&pool[a].genome, &pool[b].genome).then(pool[a].decode_seed.cmp(&pool[b].decode_seed))
    });
    let mut slots: Vec<Option<Individual<G>>> = pool.into_iter().map(Some).collect();
    Ok(chosen
        .into_iter()
        .map(|(i, rank, crowding)| {
            let mut ind = slots[i].take().expect("selected twice");
            ind.rank = rank;
            ind.crowding = crowding;
            ind
        })
        .collect())
}

/// Higher acceptance first, then lower latency.
fn fitness_order(a: &EvaluationResult, b: &EvaluationResult) -> Ordering {
    b.acceptance_ratio
        .total_cmp(&a.acceptance_ratio)
        .then(a.avg_latency.total_cmp(&b.avg_latency))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub mode: &'static str,
    pub best_ar: f64,
    pub best_latency: f64,
    pub front1_size: usize,
    pub evals_surrogate: usize,
    pub evals_online: usize,
    #[serde(skip)]
    pub hypervolume: f64,
}

#[derive(Debug, Clone)]
pub struct EvolutionOutcome<G> {
    pub best: Individual<G>,
    /// Online fitness of `best`.
    pub best_online: EvaluationResult,
    pub converged: bool,
    pub generations_used: usize,
    pub history: Vec<GenerationRecord>,
    pub evals_surrogate: usize,
    pub evals_online: usize,
}

impl<G> EvolutionOutcome<G> {
    pub fn evaluations(&self) -> usize {
        self.evals_surrogate + self.evals_online
    }
}

/// Fitness context shared by every individual of a run.
pub struct HybridEngine<'a, R: Representation> {
    pub representation: &'a R,
    pub evaluator: Evaluator<'a>,
    pub cfg: EvolutionConfig,
}

impl<R: Representation> HybridEngine<'_, R> {
    fn score(&self, ind: &Individual<R::Genome>, mode: EvaluationMode) -> Result<EvaluationResult> {
        let egs = self.representation.decode(&ind.genome, ind.decode_seed)?;
        Ok(self.evaluator.evaluate(&egs, mode))
    }

    fn evaluate_surrogate(&self, pop: &mut [Individual<R::Genome>]) -> Result<usize> {
        let pending: Vec<usize> = (0..pop.len()).filter(|&i| pop[i].fitness.is_none()).collect();
        let results: Vec<Result<EvaluationResult>> = pending
            .par_iter()
            .map(|&i| self.score(&pop[i], EvaluationMode::Surrogate))
            .collect();
        for (&i, r) in pending.iter().zip(results) {
            pop[i].fitness = Some(r?);
        }
        Ok(pending.len())
    }

    fn select(&self, pool: Vec<Individual<R::Genome>>) -> Result<Vec<Individual<R::Genome>>> {
        nsga2_select(pool, self.cfg.population_size, |a, b| self.representation.compare(a, b))
    }

    fn offspring(&self, parents: &[Individual<R::Genome>], rng: &mut ChaCha8Rng) -> Vec<Individual<R::Genome>> {
        let n = self.cfg.population_size;
        let mut children = Vec::with_capacity(n + 1);
        let mut order: Vec<usize> = (0..parents.len()).collect();
        while children.len() < n {
            order.shuffle(rng);
            for pair in order.chunks_exact(2) {
                if children.len() >= n {
                    break;
                }
                let (mut a, mut b) =
                    self.representation
                        .crossover(&parents[pair[0]].genome, &parents[pair[1]].genome, rng);
                self.representation.mutate(&mut a, rng);
                self.representation.mutate(&mut b, rng);
                children.push(Individual::new(a, rng.next_u64()));
                children.push(Individual::new(b, rng.next_u64()));
            }
        }
        children.truncate(n);
        children
    }

    fn record(
        &self,
        generation: usize,
        mode: &'static str,
        pop: &[Individual<R::Genome>],
        evals_surrogate: usize,
        evals_online: usize,
    ) -> GenerationRecord {
        let best = pop
            .iter()
            .filter_map(|i| i.fitness.as_ref())
            .min_by(|a, b| fitness_order(a, b));
        let points: Vec<Objectives> = pop.iter().filter_map(|i| i.objectives()).collect();
        let front1 = nsga2::non_dominated_sort(&points).first().map_or(0, |f| f.len());
        let penalty = self.evaluator.cfg.congestion_penalty_ms;
        GenerationRecord {
            generation,
            mode,
            best_ar: best.map_or(0.0, |b| b.acceptance_ratio),
            best_latency: best.map_or(penalty, |b| b.avg_latency),
            front1_size: front1,
            evals_surrogate,
            evals_online,
            hypervolume: nsga2::hypervolume(&points, [0.0, penalty]),
        }
    }

    pub fn run(&self) -> Result<EvolutionOutcome<R::Genome>> {
        self.cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let mut pop: Vec<Individual<R::Genome>> = (0..self.cfg.population_size)
            .map(|_| {
                let genome = self.representation.random_genome(&mut rng);
                Individual::new(genome, rng.next_u64())
            })
            .collect();
        let mut evals_surrogate = self.evaluate_surrogate(&mut pop)?;
        let mut evals_online = 0;
        pop = self.select(pop)?;
        let mut history = Vec::new();

        let (min_ar, max_lat) = (self.cfg.min_acceptance_ratio, self.cfg.max_avg_latency);
        for generation in 1..=self.cfg.max_generations {
            let mut mode = "surrogate";
            for i in 0..pop.len() {
                let passes = pop[i].fitness.as_ref().is_some_and(|f| f.meets(min_ar, max_lat));
                if !passes {
                    continue;
                }
                if pop[i].online.is_none() {
                    mode = "online";
                    pop[i].online = Some(self.score(&pop[i], EvaluationMode::Online)?);
                    evals_online += 1;
                }
                if pop[i].online.as_ref().is_some_and(|f| f.meets(min_ar, max_lat)) {
                    history.push(self.record(generation, mode, &pop, evals_surrogate, evals_online));
                    let best = pop.swap_remove(i);
                    let best_online = best.online.clone().expect("online fitness just measured");
                    return Ok(EvolutionOutcome {
                        best,
                        best_online,
                        converged: true,
                        generations_used: generation,
                        history,
                        evals_surrogate,
                        evals_online,
                    });
                }
            }

            let mut children = self.offspring(&pop, &mut rng);
            evals_surrogate += self.evaluate_surrogate(&mut children)?;
            pop.extend(children);
            pop = self.select(pop)?;
            history.push(self.record(generation, mode, &pop, evals_surrogate, evals_online));
        }

        let best_index = (0..pop.len())
            .min_by(|&a, &b| {
                let (fa, fb) = (pop[a].fitness.as_ref(), pop[b].fitness.as_ref());
                match (fa, fb) {
                    (Some(fa), Some(fb)) => fitness_order(fa, fb),
                    _ => Ordering::Equal,
                }
                .then_with(|| self.representation.compare(&pop[a].genome, &pop[b].genome))
            })
            .ok_or(Error::Config("empty population".into()))?;
        let mut best = pop.swap_remove(best_index);
        if best.online.is_none() {
            best.online = Some(self.score(&best, EvaluationMode::Online)?);
            evals_online += 1;
        }
        let best_online = best.online.clone().expect("online fitness just measured");
        Ok(EvolutionOutcome {
            best,
            best_online,
            converged: false,
            generations_used: self.cfg.max_generations,
            history,
            evals_surrogate,
            evals_online,
        })
    }
}

/// The six-gene encoding decoded through the three predictors.
pub struct GenesisProblem<'a> {
    pub requests: &'a [SfcRequest],
    pub topo: &'a Topology,
    pub predictors: &'a Predictors,
    pub solver: SolverConfig,
    pub blx_alpha: f64,
    pub mutation_sigma: f64,
}

impl Representation for GenesisProblem<'_> {
    type Genome = Genome;

    fn random_genome(&self, rng: &mut ChaCha8Rng) -> Genome {
        random_genome(rng)
    }

    fn crossover(&self, a: &Genome, b: &Genome, rng: &mut ChaCha8Rng) -> (Genome, Genome) {
        blend_crossover(a, b, self.blx_alpha, rng)
    }

    fn mutate(&self, genome: &mut Genome, rng: &mut ChaCha8Rng) {
        *genome = mutate(genome, self.mutation_sigma, rng);
    }

    fn decode(&self, genome: &Genome, decode_seed: u64) -> Result<Vec<EmbeddingGraph>> {
        let mut rng = ChaCha8Rng::seed_from_u64(decode_seed);
        decode(
            genome,
            self.requests,
            self.topo,
            self.predictors,
            &self.solver,
            &mut rng,
        )
    }

    fn compare(&self, a: &Genome, b: &Genome) -> Ordering {
        a.lex_cmp(b)
    }
}
