//! Compound runs: opinion step, then migration step, repeated.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{GraphKind, GraphSpec, SimConfig};
use crate::error::{Error, Result};
use crate::graph::{gen_small_world, gen_star, SocialGraph};
use crate::metrics::{self, PopulationSeries};
use crate::migration::{init_assignment, step_migration, CommunityAssignment};
use crate::opinion::{consensus_time, init_opinions, spread, step_opinions, Exec, OpinionState};
use crate::rng::{replicate_seed, Streams};

/// Graph for one replicate plus the star center, if any.
pub fn build_graph(spec: &GraphSpec, seed: u64) -> Result<(SocialGraph, Option<usize>)> {
    match spec.kind {
        GraphKind::SmallWorld => Ok((gen_small_world(spec.n, spec.k, spec.p_rewire, seed)?, None)),
        GraphKind::Star => {
            let star = gen_star(spec.n)?;
            let c = star.center();
            Ok((star.into_graph(), Some(c)))
        }
    }
}

/// Time-indexed record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Opinion states at `t = 0, stride, 2 * stride, ...`.
    pub opinions: Vec<OpinionState>,
    /// Assignments at the same steps as `opinions`.
    pub assignments: Vec<CommunityAssignment>,
    /// Spread of expressed opinions at every step.
    pub spreads: Vec<f64>,
    /// Community populations at every step.
    pub populations: PopulationSeries,
    pub empty_neighborhoods: usize,
}

/// Everything produced by one replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRun {
    pub replicate: usize,
    pub seed: u64,
    pub graph: SocialGraph,
    pub center: Option<usize>,
    pub trajectory: Trajectory,
}

/// Run the compound model for `horizon` steps on `graph` under `seed`.
pub fn run_compound_on(config: &SimConfig, graph: &SocialGraph, seed: u64, exec: Exec) -> Result<Trajectory> {
    let n = config.n();
    if graph.node_count() != n {
        return Err(Error::Contract(format!("graph has {} nodes, config n={n}", graph.node_count())));
    }
    let streams = Streams::new(seed);
    let stride = config.record_stride;
    let dm = graph.distances();
    let mut state = init_opinions(n, config.opinion.sigma, &streams)?;
    let mut assign = init_assignment(n, &config.migration, &streams)?;
    let mut traj = Trajectory {
        opinions: vec![state.clone()],
        assignments: vec![assign.clone()],
        spreads: vec![spread(&state)],
        populations: PopulationSeries {
            counts: vec![assign.populations()],
        },
        empty_neighborhoods: 0,
    };
    for t in 1..=config.horizon {
        let out = step_opinions(&state, &config.opinion, Some(graph), &streams, exec)?;
        traj.empty_neighborhoods += out.empty_neighborhoods;
        state = out.state;
        assign = step_migration(&state, &assign, dm, &config.migration, &streams, exec)?;
        traj.spreads.push(spread(&state));
        traj.populations.counts.push(assign.populations());
        if t % stride == 0 {
            traj.opinions.push(state.clone());
            traj.assignments.push(assign.clone());
        }
    }
    Ok(traj)
}

/// Replicate `r` of `config`: its own seed, graph and trajectory.
pub fn simulate_replicate(config: &SimConfig, r: usize, exec: Exec) -> Result<ReplicateRun> {
    config.validate()?;
    let seed = replicate_seed(config.seed, r as u64);
    let (graph, center) = build_graph(&config.graph, seed)?;
    let trajectory = run_compound_on(config, &graph, seed, exec)?;
    Ok(ReplicateRun {
        replicate: r,
        seed,
        graph,
        center,
        trajectory,
    })
}

/// Replicate 0 of `config`.
pub fn run_compound(config: &SimConfig) -> Result<ReplicateRun> {
    simulate_replicate(config, 0, Exec::Serial)
}

/// Scalar outcomes of one replicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateSummary {
    pub replicate: usize,
    pub seed: u64,
    pub consensus_time: Option<usize>,
    pub initial_spread: f64,
    pub final_spread: f64,
    /// Fluctuation range of the spread series after burn-in.
    pub spread_fluctuation: f64,
    pub first_empty_community: Option<usize>,
    pub final_populations: [usize; 2],
    pub nmr_std: f64,
    pub empty_neighborhoods: usize,
}

impl ReplicateSummary {
    pub fn from_run(config: &SimConfig, run: &ReplicateRun) -> Result<Self> {
        let traj = &run.trajectory;
        let rates = metrics::windowed_rates(&traj.populations, config.rate_window)?;
        let nmrs: Vec<f64> = rates.iter().filter_map(|r| r.nmr).collect();
        Ok(ReplicateSummary {
            replicate: run.replicate,
            seed: run.seed,
            consensus_time: consensus_time(&traj.spreads, config.consensus.eps, config.consensus.window),
            initial_spread: traj.spreads[0],
            final_spread: *traj.spreads.last().expect("spread series includes t = 0"),
            spread_fluctuation: metrics::fluctuation_range(&traj.spreads, config.burn_in())?,
            first_empty_community: traj.populations.first_empty(),
            final_populations: *traj.populations.counts.last().expect("population series includes t = 0"),
            nmr_std: metrics::std_dev(&nmrs),
            empty_neighborhoods: traj.empty_neighborhoods,
        })
    }
}

/// Result of a multi-replicate run: replicate 0 in full, summaries for all.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub first: ReplicateRun,
    pub summaries: Vec<ReplicateSummary>,
}

/// Run every replicate of `config`, fanning out over at most `workers`
/// threads (`None` means the global pool). Output does not depend on the
/// worker count.
pub fn run_batch(config: &SimConfig, workers: Option<usize>) -> Result<Batch> {
    config.validate()?;
    let work = || -> Result<Batch> {
        let first = simulate_replicate(config, 0, Exec::Serial)?;
        let rest: Result<Vec<ReplicateSummary>> = (1..config.replicates)
            .into_par_iter()
            .map(|r| ReplicateSummary::from_run(config, &simulate_replicate(config, r, Exec::Serial)?))
            .collect();
        let mut summaries = vec![ReplicateSummary::from_run(config, &first)?];
        summaries.extend(rest?);
        Ok(Batch { first, summaries })
    };
    match workers {
        None => work(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Contract(format!("thread pool: {e}")))?
            .install(work),
    }
}

/// Map `f` over replicate indices `0..replicates` in parallel, keeping order.
pub fn map_replicates<T, F>(replicates: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..replicates).into_par_iter().map(f).collect()
}
