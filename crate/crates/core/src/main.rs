use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use genesis::harness::{
    load_records, persist, render_table, replay, report, run, scenario_grid, write_summary_csv, Algorithm, Config,
    Scenario,
};

#[derive(Parser)]
#[command(
    name = "genesis",
    version,
    about = "Evolve and evaluate SFC embeddings on fat-tree data centres"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario with one algorithm for each seed.
    Run {
        #[arg(long)]
        scenario: Scenario,
        #[arg(long)]
        algorithm: Algorithm,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seed: Vec<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Also write the final embedding graphs.
        #[arg(long)]
        dump_egs: bool,
    },
    /// Run all 48 grid scenarios.
    Grid {
        #[arg(long)]
        algorithm: Algorithm,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seed: Vec<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Re-run a stored manifest and check the outcome matches.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Summarise every run below a results directory.
    Report {
        #[arg(long = "in", default_value = "results")]
        input: PathBuf,
        /// Write the summary as CSV here as well.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn load_config(path: Option<&PathBuf>) -> Result<Config> {
    match path {
        Some(p) => Config::load(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(Config::default()),
    }
}

fn execute(
    scenario: &Scenario,
    algorithm: Algorithm,
    seeds: &[u64],
    cfg: &Config,
    out: &Path,
    dump: bool,
) -> Result<()> {
    for &seed in seeds {
        let output = run(scenario, algorithm, seed, cfg)?;
        let dir = persist(&output, cfg, out, dump)?;
        let r = &output.record;
        println!(
            "{} {} seed={} converged={} generations={} ar={:.4} latency={:.3}ms evals={} wall={:.2}s -> {}",
            r.algorithm,
            r.scenario,
            r.seed,
            r.converged,
            r.generations_used,
            r.acceptance_ratio,
            r.avg_latency,
            r.evaluations(),
            r.wall_time_s,
            dir.display()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scenario,
            algorithm,
            seed,
            config,
            out,
            dump_egs,
        } => load_config(config.as_ref()).and_then(|cfg| execute(&scenario, algorithm, &seed, &cfg, &out, dump_egs)),
        Command::Grid {
            algorithm,
            seed,
            config,
            out,
        } => load_config(config.as_ref()).and_then(|cfg| {
            scenario_grid()
                .iter()
                .try_for_each(|s| execute(s, algorithm, &seed, &cfg, &out, false))
        }),
        Command::Replay { manifest } => replay(&manifest).map_err(Into::into).and_then(|(stored, fresh)| {
            if stored.record.same_outcome(&fresh.record) {
                println!(
                    "reproduced {} {} seed={}",
                    stored.algorithm, stored.scenario, stored.seed
                );
                Ok(())
            } else {
                anyhow::bail!("replay differs: stored {:?}, fresh {:?}", stored.record, fresh.record)
            }
        }),
        Command::Report { input, csv } => load_records(&input)
            .with_context(|| format!("reading {}", input.display()))
            .and_then(|records| Ok(report(&records)?))
            .and_then(|summaries| {
                print!("{}", render_table(&summaries));
                if let Some(path) = csv {
                    write_summary_csv(&summaries, std::fs::File::create(&path)?)?;
                }
                Ok(())
            }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
