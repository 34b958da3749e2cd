use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

use super::run::read_manifest;
use super::{Algorithm, RunRecord};

/// One row per algorithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub converged: usize,
    pub mean_generations: f64,
    pub min_generations: usize,
    pub max_generations: usize,
    pub mean_wall_s: f64,
    pub min_wall_s: f64,
    pub max_wall_s: f64,
}

impl Summary {
    /// e.g. `48/48 (100%)`.
    pub fn convergence(&self) -> String {
        let pct = 100.0 * self.converged as f64 / self.runs as f64;
        format!("{}/{} ({}%)", self.converged, self.runs, pct.round())
    }
}

pub fn report(records: &[RunRecord]) -> Result<Vec<Summary>> {
    if records.is_empty() {
        return Err(Error::Config("no run records to report".into()));
    }
    let mut groups: BTreeMap<Algorithm, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.algorithm).or_default().push(r);
    }
    Ok(groups
        .into_iter()
        .map(|(algorithm, rs)| {
            let n = rs.len() as f64;
            let gens = rs.iter().map(|r| r.generations_used);
            let walls = rs.iter().map(|r| r.wall_time_s);
            Summary {
                algorithm,
                runs: rs.len(),
                converged: rs.iter().filter(|r| r.converged).count(),
                mean_generations: gens.clone().sum::<usize>() as f64 / n,
                min_generations: gens.clone().min().unwrap_or(0),
                max_generations: gens.max().unwrap_or(0),
                mean_wall_s: walls.clone().sum::<f64>() / n,
                min_wall_s: walls.clone().fold(f64::INFINITY, f64::min),
                max_wall_s: walls.fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect())
}

pub fn render_table(summaries: &[Summary]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>14} {:>10} {:>6} {:>6} {:>10} {:>10} {:>10}",
        "algorithm", "converged", "gen mean", "min", "max", "wall mean", "wall min", "wall max"
    );
    for s in summaries {
        let _ = writeln!(
            out,
            "{:<10} {:>14} {:>10.2} {:>6} {:>6} {:>10.2} {:>10.2} {:>10.2}",
            s.algorithm.as_str(),
            s.convergence(),
            s.mean_generations,
            s.min_generations,
            s.max_generations,
            s.mean_wall_s,
            s.min_wall_s,
            s.max_wall_s
        );
    }
    out
}

pub fn write_summary_csv<W: Write>(summaries: &[Summary], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for s in summaries {
        writer.serialize(s)?;
    }
    writer.flush()?;
    Ok(())
}

/// Every `manifest.toml` below `root`, in path order.
pub fn load_records(root: &Path) -> Result<Vec<RunRecord>> {
    let mut paths = Vec::new();
    collect_manifests(root, &mut paths)?;
    paths.sort();
    paths.iter().map(|p| read_manifest(p).map(|m| m.record)).collect()
}

fn collect_manifests(dir: &Path, out: &mut Vec<std::path::PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_manifests(&path, out)?;
        } else if path.file_name().is_some_and(|n| n == "manifest.toml") {
            out.push(path);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(algorithm: Algorithm, converged: bool, generations: usize, wall: f64) -> RunRecord {
        RunRecord {
            scenario: "32_1_A_10_2".into(),
            algorithm,
            seed: 0,
            converged,
            generations_used: generations,
            acceptance_ratio: 1.0,
            avg_latency: 10.0,
            evals_surrogate: 0,
            evals_online: 1,
            wall_time_s: wall,
        }
    }

    #[test]
    fn all_converged() {
        let records = vec![record(Algorithm::Genesis, true, 2, 1.0); 48];
        let s = report(&records).unwrap();
        assert_eq!(s[0].convergence(), "48/48 (100%)");
    }

    #[test]
    fn single_record_statistics_coincide() {
        let s = report(&[record(Algorithm::Gda, false, 0, 0.5)]).unwrap();
        assert_eq!(s[0].mean_generations, s[0].min_generations as f64);
        assert_eq!(s[0].min_generations, s[0].max_generations);
        assert_eq!(s[0].mean_wall_s, s[0].min_wall_s);
        assert_eq!(s[0].min_wall_s, s[0].max_wall_s);
    }

    #[test]
    fn one_row_per_algorithm() {
        let records = [
            record(Algorithm::Genesis, true, 3, 1.0),
            record(Algorithm::Bega100, false, 500, 9.0),
            record(Algorithm::Genesis, true, 5, 2.0),
        ];
        let s = report(&records).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].algorithm, Algorithm::Genesis);
        assert_eq!(s[0].mean_generations, 4.0);
        assert_eq!(s[1].convergence(), "0/1 (0%)");
        assert_eq!(render_table(&s).lines().count(), 3);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(report(&[]).is_err());
    }
}
