//! On-disk artifacts of a run.
//!
//! | file              | columns / shape                                  |
//! |-------------------|--------------------------------------------------|
//! | `config.json`     | echo of the effective [`SimConfig`]              |
//! | `graph.json`      | `{"n", "edges", "center"}` of replicate 0        |
//! | `opinions.csv`    | `t,agent_id,private,expressed`                   |
//! | `populations.csv` | `t,community_id,population`                      |
//! | `rates.csv`       | `window_start,community_id,ngr,nmr`              |
//! | `assignments.csv` | `t,agent_id,community_id` (opt-in)               |
//! | `report.json`     | per-replicate summaries and aggregates           |
//!
//! Floats use Rust's shortest round-trip formatting; an undefined NMR is an
//! empty field. Identical config and seed give identical bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::metrics::{median_time, windowed_rates, PopulationSeries, RateRecord};
use crate::migration::{Community, CommunityAssignment};
use crate::opinion::OpinionState;
use crate::simulation::{Batch, ReplicateSummary};

/// Environment variable that overrides the output directory of a config.
pub const OUT_DIR_ENV: &str = "OPMIG_OUT_DIR";

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn write_opinions_csv<W: Write>(w: W, states: &[OpinionState]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["t", "agent_id", "private", "expressed"])?;
    for s in states {
        for i in 0..s.len() {
            out.write_record([
                s.t.to_string(),
                i.to_string(),
                s.private[i].to_string(),
                s.expressed[i].to_string(),
            ])?;
        }
    }
    out.flush().map_err(|e| Error::io("<opinions>", e))?;
    Ok(())
}

pub fn write_populations_csv<W: Write>(w: W, series: &PopulationSeries) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["t", "community_id", "population"])?;
    for (t, counts) in series.counts.iter().enumerate() {
        for c in Community::ALL {
            out.write_record([t.to_string(), c.index().to_string(), counts[c.index()].to_string()])?;
        }
    }
    out.flush().map_err(|e| Error::io("<populations>", e))?;
    Ok(())
}

pub fn write_rates_csv<W: Write>(w: W, rates: &[RateRecord]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["window_start", "community_id", "ngr", "nmr"])?;
    for r in rates {
        out.write_record([
            r.window_start.to_string(),
            r.community.index().to_string(),
            r.ngr.to_string(),
            r.nmr.map(|x| x.to_string()).unwrap_or_default(),
        ])?;
    }
    out.flush().map_err(|e| Error::io("<rates>", e))?;
    Ok(())
}

pub fn write_assignments_csv<W: Write>(w: W, assignments: &[CommunityAssignment]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["t", "agent_id", "community_id"])?;
    for a in assignments {
        for (i, c) in a.assign.iter().enumerate() {
            out.write_record([a.t.to_string(), i.to_string(), c.index().to_string()])?;
        }
    }
    out.flush().map_err(|e| Error::io("<assignments>", e))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport<'a> {
    pub scenario: &'a str,
    pub seed: u64,
    pub n: usize,
    pub horizon: usize,
    pub replicates: usize,
    pub consensus_eps: f64,
    pub consensus_window: usize,
    /// Consensus time of replicate 0.
    pub consensus_time: Option<usize>,
    pub median_consensus_time: Option<f64>,
    pub converged_replicates: usize,
    pub emptied_replicates: usize,
    pub summaries: &'a [ReplicateSummary],
}

impl<'a> RunReport<'a> {
    pub fn new(config: &'a SimConfig, batch: &'a Batch) -> Self {
        let times: Vec<Option<usize>> = batch.summaries.iter().map(|s| s.consensus_time).collect();
        RunReport {
            scenario: &config.scenario,
            seed: config.seed,
            n: config.n(),
            horizon: config.horizon,
            replicates: config.replicates,
            consensus_eps: config.consensus.eps,
            consensus_window: config.consensus.window,
            consensus_time: batch.summaries[0].consensus_time,
            median_consensus_time: median_time(&times),
            converged_replicates: times.iter().filter(|t| t.is_some()).count(),
            emptied_replicates: batch.summaries.iter().filter(|s| s.first_empty_community.is_some()).count(),
            summaries: &batch.summaries,
        }
    }
}

/// Output directory: explicit override, then the environment, then the
/// config, then `out/<scenario>`.
pub fn resolve_out_dir(explicit: Option<&Path>, config: &SimConfig) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_DIR_ENV) {
        return PathBuf::from(p);
    }
    config
        .output_dir
        .clone()
        .unwrap_or_else(|| Path::new("out").join(&config.scenario))
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Write the full artifact bundle of `batch` into `dir`. Returns the paths
/// written, in a fixed order.
pub fn write_bundle(dir: &Path, config: &SimConfig, batch: &Batch) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let traj = &batch.first.trajectory;
    let mut written = Vec::new();
    let mut emit = |name: &str, f: &mut dyn FnMut(&Path) -> Result<()>| -> Result<()> {
        let path = dir.join(name);
        f(&path)?;
        written.push(path);
        Ok(())
    };
    emit("config.json", &mut |p| write_text(p, &config.to_json()?))?;
    emit("graph.json", &mut |p| {
        write_text(p, &batch.first.graph.to_document(batch.first.center).to_json()?)
    })?;
    emit("opinions.csv", &mut |p| write_opinions_csv(create(p)?, &traj.opinions))?;
    emit("populations.csv", &mut |p| write_populations_csv(create(p)?, &traj.populations))?;
    let rates = windowed_rates(&traj.populations, config.rate_window)?;
    emit("rates.csv", &mut |p| write_rates_csv(create(p)?, &rates))?;
    if config.record_assignments {
        emit("assignments.csv", &mut |p| write_assignments_csv(create(p)?, &traj.assignments))?;
    }
    emit("report.json", &mut |p| {
        let mut s = serde_json::to_string_pretty(&RunReport::new(config, batch))?;
        s.push('\n');
        write_text(p, &s)
    })?;
    Ok(written)
}
