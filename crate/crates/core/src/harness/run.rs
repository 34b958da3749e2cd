use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines::{gda_embed, BegaProblem};
use crate::error::{Error, Result};
use crate::evolution::{
    EvolutionConfig, EvolutionOutcome, GenerationRecord, GenesisProblem, HybridEngine, Representation,
};
use crate::netsim::{write_latency_csv, EvaluationMode, Evaluator, LatencyReport};
use crate::solvers::{write_embeddings, EmbeddingGraph};

use super::{Config, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Algorithm {
    Genesis,
    Bega100,
    Bega2000,
    Gda,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Genesis,
        Algorithm::Bega100,
        Algorithm::Bega2000,
        Algorithm::Gda,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Genesis => "genesis",
            Algorithm::Bega100 => "bega100",
            Algorithm::Bega2000 => "bega2000",
            Algorithm::Gda => "gda",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL.into_iter().find(|a| a.as_str() == s).ok_or_else(|| {
            Error::Config(format!(
                "unknown algorithm {s:?}; expected genesis, bega100, bega2000 or gda"
            ))
        })
    }
}

impl From<Algorithm> for String {
    fn from(a: Algorithm) -> String {
        a.to_string()
    }
}

impl TryFrom<String> for Algorithm {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub converged: bool,
    pub generations_used: usize,
    pub acceptance_ratio: f64,
    /// Online average latency, ms.
    pub avg_latency: f64,
    pub evals_surrogate: usize,
    pub evals_online: usize,
    pub wall_time_s: f64,
}

impl RunRecord {
    pub fn evaluations(&self) -> usize {
        self.evals_surrogate + self.evals_online
    }

    /// Equality ignoring wall time.
    pub fn same_outcome(&self, other: &RunRecord) -> bool {
        RunRecord {
            wall_time_s: 0.0,
            ..self.clone()
        } == RunRecord {
            wall_time_s: 0.0,
            ..other.clone()
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: RunRecord,
    pub history: Vec<GenerationRecord>,
    pub embeddings: Vec<EmbeddingGraph>,
    pub latency: LatencyReport,
    /// Human-readable final genome.
    pub final_genome: String,
}

impl RunOutput {
    pub fn history_csv(&self) -> Result<Vec<u8>> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in &self.history {
            writer.serialize(row)?;
        }
        writer.flush()?;
        writer
            .into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub scenario: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub final_genome: String,
    pub record: RunRecord,
    pub config: Config,
}

/// Outcome, decoded best embeddings, their online latency, genome text.
type Evolved<G> = (EvolutionOutcome<G>, Vec<EmbeddingGraph>, LatencyReport, String);

fn evolve<R: Representation>(
    representation: &R,
    evaluator: Evaluator<'_>,
    cfg: EvolutionConfig,
    describe: impl Fn(&R::Genome) -> String,
) -> Result<Evolved<R::Genome>> {
    let engine = HybridEngine {
        representation,
        evaluator,
        cfg,
    };
    let outcome = engine.run()?;
    let egs = representation.decode(&outcome.best.genome, outcome.best.decode_seed)?;
    let (_, latency) = evaluator.evaluate_detailed(&egs, EvaluationMode::Online);
    let genome = describe(&outcome.best.genome);
    Ok((outcome, egs, latency, genome))
}

pub fn run(scenario: &Scenario, algorithm: Algorithm, seed: u64, cfg: &Config) -> Result<RunOutput> {
    cfg.validate()?;
    let started = Instant::now();
    let inst = scenario.build(cfg)?;
    let evaluator = Evaluator {
        topo: &inst.topo,
        pattern: &inst.pattern,
        profile: &cfg.workload.profile,
        cfg: &cfg.netsim,
    };
    let evo_cfg = EvolutionConfig { seed, ..cfg.evolution };

    let (record_core, history, embeddings, latency, final_genome) = match algorithm {
        Algorithm::Genesis => {
            let problem = GenesisProblem {
                requests: &inst.requests,
                topo: &inst.topo,
                predictors: &inst.predictors,
                solver: cfg.solver,
                blx_alpha: evo_cfg.blx_alpha,
                mutation_sigma: evo_cfg.mutation_sigma,
            };
            let (out, egs, latency, genome) = evolve(&problem, evaluator, evo_cfg, |g| format!("{:?}", g.0))?;
            (summarise(&out), out.history, egs, latency, genome)
        }
        Algorithm::Bega100 | Algorithm::Bega2000 => {
            let population_size = if algorithm == Algorithm::Bega100 { 100 } else { 2000 };
            let problem = BegaProblem::new(&inst.requests, &inst.topo, cfg.solver);
            let (out, egs, latency, genome) = evolve(
                &problem,
                evaluator,
                EvolutionConfig {
                    population_size,
                    ..evo_cfg
                },
                |g| format!("{:?}", g.hosts().unwrap_or_default()),
            )?;
            (summarise(&out), out.history, egs, latency, genome)
        }
        Algorithm::Gda => {
            let out = gda_embed(
                &inst.requests,
                &inst.topo,
                &inst.pattern,
                &cfg.workload.profile,
                &evaluator,
                &cfg.solver,
            )?;
            let f = &out.fitness;
            let converged = f.meets(evo_cfg.min_acceptance_ratio, evo_cfg.max_avg_latency);
            let history = vec![GenerationRecord {
                generation: 0,
                mode: "online",
                best_ar: f.acceptance_ratio,
                best_latency: f.avg_latency,
                front1_size: 1,
                evals_surrogate: 0,
                evals_online: out.evaluations,
                hypervolume: 0.0,
            }];
            let genome = format!(
                "{:?}",
                out.egs
                    .iter()
                    .map(|eg| eg.placed().map(|(_, h)| h.index).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            );
            let core = (converged, 0, f.acceptance_ratio, f.avg_latency, 0, out.evaluations);
            (core, history, out.egs, out.latency, genome)
        }
    };
    let (converged, generations_used, acceptance_ratio, avg_latency, evals_surrogate, evals_online) = record_core;
    Ok(RunOutput {
        record: RunRecord {
            scenario: scenario.name(),
            algorithm,
            seed,
            converged,
            generations_used,
            acceptance_ratio,
            avg_latency,
            evals_surrogate,
            evals_online,
            wall_time_s: started.elapsed().as_secs_f64(),
        },
        history,
        embeddings,
        latency,
        final_genome,
    })
}

fn summarise<G>(out: &EvolutionOutcome<G>) -> (bool, usize, f64, f64, usize, usize) {
    (
        out.converged,
        out.generations_used,
        out.best_online.acceptance_ratio,
        out.best_online.avg_latency,
        out.evals_surrogate,
        out.evals_online,
    )
}

/// Writes `<root>/<algorithm>/<scenario>/<seed>/` and returns that path.
pub fn persist(output: &RunOutput, cfg: &Config, root: &Path, dump_embeddings: bool) -> Result<PathBuf> {
    let r = &output.record;
    let dir = root
        .join(r.algorithm.as_str())
        .join(&r.scenario)
        .join(r.seed.to_string());
    fs::create_dir_all(&dir)?;
    let manifest = Manifest {
        scenario: r.scenario.clone(),
        algorithm: r.algorithm,
        seed: r.seed,
        final_genome: output.final_genome.clone(),
        record: r.clone(),
        config: *cfg,
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(dir.join("manifest.toml"), text)?;
    fs::write(dir.join("history.csv"), output.history_csv()?)?;
    write_latency_csv(&output.latency, fs::File::create(dir.join("latency.csv"))?)?;
    if dump_embeddings {
        write_embeddings(
            &output.embeddings,
            std::io::BufWriter::new(fs::File::create(dir.join("embeddings.txt"))?),
        )?;
    }
    Ok(dir)
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    toml::from_str(&fs::read_to_string(path)?).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Re-runs a manifest. Returns the stored manifest and the fresh output.
pub fn replay(path: &Path) -> Result<(Manifest, RunOutput)> {
    let manifest = read_manifest(path)?;
    let scenario: Scenario = manifest.scenario.parse()?;
    let output = run(&scenario, manifest.algorithm, manifest.seed, &manifest.config)?;
    Ok((manifest, output))
}
