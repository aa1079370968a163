//! Bounded-confidence opinion dynamics with private/expressed opinions and
//! uniform noise.
//!
//! Each step, agent `i` moves to
//! `phi * (x_i + mean_{j in N_i}(xh_j - xh_i)) + (1 - phi) * eps_i`,
//! where `xh = sigma * x` is the expressed opinion, `N_i` the agents whose
//! expressed opinion is strictly within `d` of `xh_i`, and
//! `eps_i ~ U(min x, max x)`. The update is synchronous: every quantity is
//! read from the time-`t` state.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::rng::{Domain, Streams};

/// Which agents may enter a neighbourhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeighborhoodMode {
    /// Anyone within the confidence threshold.
    #[default]
    OpinionOnly,
    /// Graph neighbours within the confidence threshold.
    GraphAndOpinion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Independent draw per agent per step.
    #[default]
    PerAgent,
    /// One draw per step shared by all agents.
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpinionParams {
    /// Confidence threshold.
    pub d: f64,
    /// Undisturbed degree; `1 - phi` weights the noise.
    pub phi: f64,
    /// Reduction rate from private to expressed opinion.
    pub sigma: f64,
    pub neighborhood: NeighborhoodMode,
    pub include_self: bool,
    pub noise: NoiseMode,
}

impl Default for OpinionParams {
    fn default() -> Self {
        OpinionParams {
            d: 1.0,
            phi: 0.5,
            sigma: 0.4,
            neighborhood: NeighborhoodMode::OpinionOnly,
            include_self: true,
            noise: NoiseMode::PerAgent,
        }
    }
}

impl OpinionParams {
    pub fn new(d: f64, phi: f64, sigma: f64) -> Self {
        OpinionParams {
            d,
            phi,
            sigma,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::param("d", format!("must be a positive finite number, got {}", self.d)));
        }
        if !(0.0..=1.0).contains(&self.phi) {
            return Err(Error::param("phi", format!("must lie in [0, 1], got {}", self.phi)));
        }
        if !(0.0..=1.0).contains(&self.sigma) {
            return Err(Error::param("sigma", format!("must lie in [0, 1], got {}", self.sigma)));
        }
        Ok(())
    }

    /// Whether `phi + sigma < 1`, the regime with a proven quasi-consensus.
    pub fn in_contraction_regime(&self) -> bool {
        self.phi + self.sigma < 1.0
    }
}

/// Private and expressed opinions of all agents at step `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionState {
    pub t: usize,
    pub private: Vec<f64>,
    pub expressed: Vec<f64>,
}

impl OpinionState {
    /// Build a state whose expressed opinions are `sigma * private`.
    pub fn from_private(t: usize, private: Vec<f64>, sigma: f64) -> Self {
        let expressed = private.iter().map(|&x| sigma * x).collect();
        OpinionState {
            t,
            private,
            expressed,
        }
    }

    pub fn len(&self) -> usize {
        self.private.len()
    }

    pub fn is_empty(&self) -> bool {
        self.private.is_empty()
    }

    /// `[min, max]` of private opinions; the noise support.
    pub fn private_bounds(&self) -> (f64, f64) {
        bounds(&self.private)
    }
}

fn bounds(xs: &[f64]) -> (f64, f64) {
    xs.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Private opinions i.i.d. `U(0, 1)`, one keyed stream per agent.
pub fn init_opinions(n: usize, sigma: f64, streams: &Streams) -> Result<OpinionState> {
    if n == 0 {
        return Err(Error::param("n", "need at least one agent"));
    }
    let private = (0..n)
        .map(|i| streams.uniform(Domain::InitOpinion, 0, i as u64))
        .collect();
    Ok(OpinionState::from_private(0, private, sigma))
}

/// Neighbourhood of agent `i`, in ascending id order.
///
/// Reference implementation of the membership rule; the stepping code uses
/// a sorted sweep that selects the same agents.
pub fn neighborhood(
    state: &OpinionState,
    i: usize,
    params: &OpinionParams,
    graph: Option<&SocialGraph>,
) -> Result<Vec<usize>> {
    let xi = state.expressed[i];
    let within = |j: usize| (xi - state.expressed[j]).abs() < params.d;
    let keep_self = |j: usize| j != i || params.include_self;
    Ok(match params.neighborhood {
        NeighborhoodMode::OpinionOnly => (0..state.len()).filter(|&j| keep_self(j) && within(j)).collect(),
        NeighborhoodMode::GraphAndOpinion => {
            let g = require_graph(graph, state.len())?;
            let mut out: Vec<usize> = g.neighbors(i).iter().copied().filter(|&j| within(j)).collect();
            if params.include_self {
                out.push(i);
                out.sort_unstable();
            }
            out
        }
    })
}

fn require_graph(graph: Option<&SocialGraph>, n: usize) -> Result<&SocialGraph> {
    let g = graph.ok_or_else(|| Error::param("neighborhood", "graph-and-opinion mode needs a graph"))?;
    if g.node_count() != n {
        return Err(Error::param(
            "graph",
            format!("graph has {} nodes but state has {n} agents", g.node_count()),
        ));
    }
    Ok(g)
}

/// Noise draws for the step from `state.t` to `state.t + 1`.
///
/// Every draw lies in `[min x, max x]`; a degenerate interval yields the
/// common value. Returns zeros when `phi == 1`, since the noise weight is
/// then zero.
pub fn draw_noise(state: &OpinionState, params: &OpinionParams, streams: &Streams) -> Vec<f64> {
    let n = state.len();
    if params.phi == 1.0 {
        return vec![0.0; n];
    }
    let (lo, hi) = state.private_bounds();
    let t = state.t as u64;
    let draw = |index: u64| {
        if hi <= lo {
            return lo;
        }
        let u: f64 = streams.rng(Domain::Noise, t, index).gen();
        (lo + u * (hi - lo)).min(hi)
    };
    match params.noise {
        NoiseMode::PerAgent => (0..n as u64).map(draw).collect(),
        NoiseMode::Shared => vec![draw(u64::MAX); n],
    }
}

/// Execution strategy for per-agent work within a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    #[default]
    Serial,
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub state: OpinionState,
    /// Agents whose neighbourhood was empty; their averaging term is 0.
    pub empty_neighborhoods: usize,
}

/// Apply one synchronous update with the given noise draws.
pub fn apply_update(
    state: &OpinionState,
    params: &OpinionParams,
    graph: Option<&SocialGraph>,
    noise: &[f64],
    exec: Exec,
) -> Result<StepOutput> {
    let n = state.len();
    if noise.len() != n {
        return Err(Error::Contract(format!("{} noise draws for {n} agents", noise.len())));
    }
    let pull: Box<dyn Fn(usize) -> Option<f64> + Sync + '_> = match params.neighborhood {
        NeighborhoodMode::OpinionOnly => {
            let sweep = OpinionSweep::new(&state.expressed);
            Box::new(move |i| sweep.mean_difference(state.expressed[i], params))
        }
        NeighborhoodMode::GraphAndOpinion => {
            let g = require_graph(graph, n)?;
            Box::new(move |i| graph_mean_difference(state, g, i, params))
        }
    };
    let update = |i: usize| {
        let (avg, empty) = match pull(i) {
            Some(m) => (m, false),
            None => (0.0, true),
        };
        let x = params.phi * (state.private[i] + avg) + (1.0 - params.phi) * noise[i];
        (x, empty)
    };
    let out: Vec<(f64, bool)> = match exec {
        Exec::Serial => (0..n).map(update).collect(),
        Exec::Parallel => (0..n).into_par_iter().map(update).collect(),
    };
    let empty_neighborhoods = out.iter().filter(|(_, e)| *e).count();
    let private = out.into_iter().map(|(x, _)| x).collect();
    Ok(StepOutput {
        state: OpinionState::from_private(state.t + 1, private, params.sigma),
        empty_neighborhoods,
    })
}

/// One full step: draw noise, then update.
pub fn step_opinions(
    state: &OpinionState,
    params: &OpinionParams,
    graph: Option<&SocialGraph>,
    streams: &Streams,
    exec: Exec,
) -> Result<StepOutput> {
    let noise = draw_noise(state, params, streams);
    apply_update(state, params, graph, &noise, exec)
}

/// Sorted expressed opinions with prefix sums of their offsets from the
/// minimum. Window sums over a contiguous sorted range then cost O(1).
struct OpinionSweep {
    sorted: Vec<f64>,
    offset_prefix: Vec<f64>,
    base: f64,
}

impl OpinionSweep {
    fn new(expressed: &[f64]) -> Self {
        let mut sorted = expressed.to_vec();
        sorted.sort_by(f64::total_cmp);
        let base = sorted.first().copied().unwrap_or(0.0);
        let mut offset_prefix = Vec::with_capacity(sorted.len() + 1);
        offset_prefix.push(0.0);
        let mut acc = 0.0;
        for &x in &sorted {
            acc += x - base;
            offset_prefix.push(acc);
        }
        OpinionSweep {
            sorted,
            offset_prefix,
            base,
        }
    }

    /// Mean of `xh_j - xh_i` over the neighbourhood, or `None` if empty.
    fn mean_difference(&self, xi: f64, params: &OpinionParams) -> Option<f64> {
        let d = params.d;
        // same predicate as `neighborhood`: |xi - x| < d, split by side
        let lo = self.sorted.partition_point(|&x| x < xi && xi - x >= d);
        let hi = self.sorted.partition_point(|&x| x <= xi || x - xi < d);
        let mut count = hi - lo;
        let mut offset_sum = self.offset_prefix[hi] - self.offset_prefix[lo];
        let own_offset = xi - self.base;
        if !params.include_self {
            count -= 1;
            offset_sum -= own_offset;
        }
        if count == 0 {
            return None;
        }
        Some(offset_sum / count as f64 - own_offset)
    }
}

fn graph_mean_difference(state: &OpinionState, g: &SocialGraph, i: usize, params: &OpinionParams) -> Option<f64> {
    let xi = state.expressed[i];
    let mut sum = 0.0;
    let mut count = 0usize;
    for &j in g.neighbors(i) {
        let diff = state.expressed[j] - xi;
        if diff.abs() < params.d {
            sum += diff;
            count += 1;
        }
    }
    if params.include_self {
        count += 1;
    }
    (count > 0).then(|| sum / count as f64)
}

/// Largest pairwise gap between expressed opinions.
pub fn spread(state: &OpinionState) -> f64 {
    spread_of(&state.expressed)
}

pub fn spread_of(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let (lo, hi) = bounds(values);
    hi - lo
}

/// Default consensus threshold on the spread.
pub const CONSENSUS_EPS: f64 = 0.01;
/// Default number of consecutive steps the spread must stay below threshold.
pub const CONSENSUS_WINDOW: usize = 10;

/// First `t` with `spreads[t..t + window]` all below `eps`.
pub fn consensus_time(spreads: &[f64], eps: f64, window: usize) -> Option<usize> {
    assert!(eps > 0.0 && window >= 1, "consensus_time needs eps > 0 and window >= 1");
    let mut run = 0usize;
    for (t, &s) in spreads.iter().enumerate() {
        if s < eps {
            run += 1;
            if run == window {
                return Some(t + 1 - window);
            }
        } else {
            run = 0;
        }
    }
    None
}

/// A full opinion-only trajectory, one state per step including `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionRun {
    pub states: Vec<OpinionState>,
    pub spreads: Vec<f64>,
    pub empty_neighborhoods: usize,
}

impl OpinionRun {
    /// Initial private-opinion spread.
    pub fn initial_private_spread(&self) -> f64 {
        spread_of(&self.states[0].private)
    }

    /// Expressed-opinion series of agent `i`.
    pub fn agent_series(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.expressed[i]).collect()
    }
}

/// Initialise and step opinions for `horizon` steps under `seed`.
pub fn simulate_opinions(
    n: usize,
    params: &OpinionParams,
    graph: Option<&SocialGraph>,
    horizon: usize,
    seed: u64,
    exec: Exec,
) -> Result<OpinionRun> {
    params.validate()?;
    let streams = Streams::new(seed);
    let mut state = init_opinions(n, params.sigma, &streams)?;
    let mut states = Vec::with_capacity(horizon + 1);
    let mut spreads = Vec::with_capacity(horizon + 1);
    let mut empty = 0;
    spreads.push(spread(&state));
    for _ in 0..horizon {
        let out = step_opinions(&state, params, graph, &streams, exec)?;
        empty += out.empty_neighborhoods;
        states.push(std::mem::replace(&mut state, out.state));
        spreads.push(spread(&state));
    }
    states.push(state);
    Ok(OpinionRun {
        states,
        spreads,
        empty_neighborhoods: empty,
    })
}
