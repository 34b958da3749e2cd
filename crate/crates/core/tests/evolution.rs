mod common;

use std::f64::consts::PI;

use genesis::evolution::{blend_crossover, mutate, nsga2_select, EvolutionConfig, Individual, Representation};
use genesis::harness::Config;
use genesis::netsim::EvaluationMode;
use genesis::neuro::Genome;
use genesis::nsga2::dominates;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small(seed: u64, generations: usize) -> EvolutionConfig {
    EvolutionConfig {
        population_size: 20,
        max_generations: generations,
        seed,
        ..EvolutionConfig::default()
    }
}

#[test]
fn blend_covers_extended_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (p1, p2) = (Genome([0.0; 6]), Genome([1.0; 6]));
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..10_000 {
        let (c, _) = blend_crossover(&p1, &p2, 0.5, &mut rng);
        lo = lo.min(c.0[0]);
        hi = hi.max(c.0[0]);
    }
    assert!(lo < -0.4 && (-0.5..).contains(&lo), "{lo}");
    assert!(hi > 1.4 && hi <= 1.5, "{hi}");
}

#[test]
fn mutation_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let deltas: Vec<f64> = (0..10_000).map(|_| mutate(&Genome::ZERO, PI, &mut rng).0[0]).collect();
    let mean = deltas.iter().sum::<f64>() / deltas.len() as f64;
    let var = deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (deltas.len() - 1) as f64;
    assert!(mean.abs() < 0.1, "{mean}");
    assert!((var.sqrt() - PI).abs() < 0.1, "{}", var.sqrt());
}

#[test]
fn vacuous_thresholds_converge_immediately() {
    let cfg = Config::default();
    let inst = common::instance("32_2_B_5_0.5", &cfg);
    let problem = common::genesis_problem(&inst, &cfg);
    let evo = EvolutionConfig {
        min_acceptance_ratio: 0.0,
        max_avg_latency: f64::INFINITY,
        ..small(1, 10)
    };
    let out = common::engine(&problem, common::evaluator(&inst, &cfg), evo)
        .run()
        .unwrap();
    assert!(out.converged);
    assert_eq!(out.generations_used, 1);
}

#[test]
fn zero_generations_returns_initial_best() {
    let cfg = Config::default();
    let inst = common::instance("8_1_A_10_2", &cfg);
    let problem = common::genesis_problem(&inst, &cfg);
    let out = common::engine(&problem, common::evaluator(&inst, &cfg), small(2, 0))
        .run()
        .unwrap();
    assert!(!out.converged);
    assert_eq!(out.generations_used, 0);
    assert!(out.history.is_empty());
    assert_eq!(out.evals_surrogate, 20);
}

#[test]
fn fronts_and_hypervolume_across_generations() {
    let cfg = Config::default();
    let inst = common::instance("32_1_B_5_1", &cfg);
    let problem = common::genesis_problem(&inst, &cfg);
    let evo = EvolutionConfig {
        min_acceptance_ratio: 1.1,
        ..small(3, 15)
    };
    let eval = common::evaluator(&inst, &cfg);
    let out = common::engine(&problem, eval, evo).run().unwrap();
    assert_eq!(out.history.len(), 15);
    for w in out.history.windows(2) {
        assert!(w[1].hypervolume >= w[0].hypervolume - 1e-9, "{:?}", w);
        assert!(w[1].evals_surrogate == w[0].evals_surrogate + 20);
    }
}

#[test]
fn front_one_is_mutually_non_dominated() {
    let cfg = Config::default();
    let inst = common::instance("32_1_A_5_0.5", &cfg);
    let problem = common::genesis_problem(&inst, &cfg);
    let eval = common::evaluator(&inst, &cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut pool = Vec::new();
    for _ in 0..40 {
        let g = problem.random_genome(&mut rng);
        let mut ind = Individual::new(g, rng.next_u64());
        let egs = problem.decode(&ind.genome, ind.decode_seed).unwrap();
        ind.fitness = Some(eval.evaluate(&egs, EvaluationMode::Surrogate));
        pool.push(ind);
    }
    let chosen = nsga2_select(pool, 20, |a: &Genome, b| a.lex_cmp(b)).unwrap();
    let front: Vec<_> = chosen
        .iter()
        .filter(|i| i.rank == 1)
        .map(|i| i.objectives().unwrap())
        .collect();
    assert!(!front.is_empty());
    for a in &front {
        for b in &front {
            assert!(!dominates(a, b));
        }
    }
    assert!(chosen.windows(2).all(|w| w[0].rank <= w[1].rank));
}

#[test]
fn converged_runs_reproduce_online() {
    let cfg = Config::default();
    let inst = common::instance("8_1_A_10_2", &cfg);
    let problem = common::genesis_problem(&inst, &cfg);
    let eval = common::evaluator(&inst, &cfg);
    for seed in 0..5 {
        let out = common::engine(&problem, eval, small(seed, 30)).run().unwrap();
        if out.converged {
            let egs = problem.decode(&out.best.genome, out.best.decode_seed).unwrap();
            let again = eval.evaluate(&egs, EvaluationMode::Online);
            assert_eq!(again, out.best_online);
            assert!(again.meets(1.0, 100.0));
        }
    }
}

#[test]
fn identical_seeds_identical_history() {
    let cfg = Config::default();
    let inst = common::instance("32_2_A_5_0.5", &cfg);
    let problem = common::genesis_problem(&inst, &cfg);
    let eval = common::evaluator(&inst, &cfg);
    let a = common::engine(&problem, eval, small(8, 5)).run().unwrap();
    let b = common::engine(&problem, eval, small(8, 5)).run().unwrap();
    assert_eq!(a.history, b.history);
    assert_eq!(a.best.genome, b.best.genome);
}
