//! Two-community migration driven by a softmax over social distance and
//! opinion distance.
//!
//! Agent `i` scores community `c` with
//! `u_c = s * (delta * d(i, Q_c) + (1 - delta) * |xh_i - avg_c|)` and picks
//! `c` with probability `exp(u_c) / sum exp(u)`. `s = +1` is the literal
//! sign (larger distances attract); `s = -1` is the attractive variant.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DistanceMatrix;
use crate::opinion::{Exec, OpinionState};
use crate::rng::{Domain, Streams};

/// One of the two competing communities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Community {
    A,
    B,
}

impl Community {
    pub const ALL: [Community; 2] = [Community::A, Community::B];

    pub fn index(self) -> usize {
        match self {
            Community::A => 0,
            Community::B => 1,
        }
    }

    pub fn other(self) -> Community {
        match self {
            Community::A => Community::B,
            Community::B => Community::A,
        }
    }
}

impl TryFrom<u8> for Community {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(Community::A),
            1 => Ok(Community::B),
            _ => Err(format!("community id must be 0 or 1, got {v}")),
        }
    }
}

impl From<Community> for u8 {
    fn from(c: Community) -> u8 {
        c.index() as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UtilitySign {
    #[default]
    Literal,
    Attractive,
}

impl UtilitySign {
    fn factor(self) -> f64 {
        match self {
            UtilitySign::Literal => 1.0,
            UtilitySign::Attractive => -1.0,
        }
    }
}

/// What an empty community contributes to the softmax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmptyCommunityRule {
    /// Probability 0: an emptied community is never re-entered.
    #[default]
    ZeroProbability,
    /// Utility 0, i.e. weight `exp(0)`.
    UniformFallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pin {
    pub agent: usize,
    pub community: Community,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialSplit {
    /// Each agent joins either community with probability 1/2.
    #[default]
    Random,
    /// Explicit community per agent.
    Fixed(Vec<Community>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MigrationParams {
    /// Weight of social distance; `1 - delta` weights opinion distance.
    pub delta: f64,
    pub utility_sign: UtilitySign,
    pub pinned: Vec<Pin>,
    pub empty_community: EmptyCommunityRule,
    pub initial: InitialSplit,
}

impl Default for MigrationParams {
    fn default() -> Self {
        MigrationParams {
            delta: 0.5,
            utility_sign: UtilitySign::Literal,
            pinned: Vec::new(),
            empty_community: EmptyCommunityRule::ZeroProbability,
            initial: InitialSplit::Random,
        }
    }
}

impl MigrationParams {
    pub fn with_delta(delta: f64) -> Self {
        MigrationParams {
            delta,
            ..Default::default()
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::param("delta", format!("must lie in [0, 1], got {}", self.delta)));
        }
        if let Some(p) = self.pinned.iter().find(|p| p.agent >= n) {
            return Err(Error::param("pinned", format!("agent {} out of range for n={n}", p.agent)));
        }
        if let InitialSplit::Fixed(v) = &self.initial {
            if v.len() != n {
                return Err(Error::param("initial", format!("fixed split has {} entries for n={n}", v.len())));
            }
        }
        Ok(())
    }

    fn pin_of(&self, agent: usize) -> Option<Community> {
        self.pinned.iter().find(|p| p.agent == agent).map(|p| p.community)
    }
}

/// Community of every agent at step `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityAssignment {
    pub t: usize,
    pub assign: Vec<Community>,
}

impl CommunityAssignment {
    pub fn new(t: usize, assign: Vec<Community>) -> Self {
        CommunityAssignment { t, assign }
    }

    pub fn len(&self) -> usize {
        self.assign.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assign.is_empty()
    }

    pub fn populations(&self) -> [usize; 2] {
        let b = self.assign.iter().filter(|&&c| c == Community::B).count();
        [self.assign.len() - b, b]
    }

    /// Member ids of `c` in ascending order.
    pub fn members(&self, c: Community) -> Vec<usize> {
        (0..self.assign.len()).filter(|&i| self.assign[i] == c).collect()
    }

    /// The same partition with the two labels exchanged.
    pub fn swap_labels(&self) -> Self {
        CommunityAssignment {
            t: self.t,
            assign: self.assign.iter().map(|c| c.other()).collect(),
        }
    }
}

/// Initial assignment at `t = 0`, with pins applied.
pub fn init_assignment(n: usize, params: &MigrationParams, streams: &Streams) -> Result<CommunityAssignment> {
    params.validate(n)?;
    let mut assign: Vec<Community> = match &params.initial {
        InitialSplit::Random => (0..n)
            .map(|i| {
                if streams.uniform(Domain::InitAssignment, 0, i as u64) < 0.5 {
                    Community::A
                } else {
                    Community::B
                }
            })
            .collect(),
        InitialSplit::Fixed(v) => v.clone(),
    };
    for p in &params.pinned {
        assign[p.agent] = p.community;
    }
    Ok(CommunityAssignment::new(0, assign))
}

/// Mean expressed opinion over `members`; `None` when empty.
pub fn avg_expressed(state: &OpinionState, members: &[usize]) -> Option<f64> {
    if members.is_empty() {
        return None;
    }
    let sum: f64 = members.iter().map(|&j| state.expressed[j]).sum();
    Some(sum / members.len() as f64)
}

/// Per-step quantities shared by every agent's decision.
struct Snapshot<'a> {
    state: &'a OpinionState,
    assign: &'a CommunityAssignment,
    dm: &'a DistanceMatrix,
    params: &'a MigrationParams,
    populations: [usize; 2],
}

impl<'a> Snapshot<'a> {
    fn new(
        state: &'a OpinionState,
        assign: &'a CommunityAssignment,
        dm: &'a DistanceMatrix,
        params: &'a MigrationParams,
    ) -> Result<Self> {
        let n = assign.len();
        if state.len() != n || dm.len() != n {
            return Err(Error::Contract(format!(
                "size mismatch: {} opinions, {n} assignments, {} distance rows",
                state.len(),
                dm.len()
            )));
        }
        Ok(Snapshot {
            state,
            assign,
            dm,
            params,
            populations: assign.populations(),
        })
    }

    /// Mean social distance and mean expressed-opinion difference from
    /// agent `i` to each nonempty community. The opinion gap is averaged as
    /// `|mean(xh_j - xh_i)|`, which is exactly 0 at consensus.
    fn gaps(&self, i: usize) -> Result<[Option<(f64, f64)>; 2]> {
        let xi = self.state.expressed[i];
        let mut hops = [0u64; 2];
        let mut diffs = [0.0f64; 2];
        for (j, c) in self.assign.assign.iter().enumerate() {
            let h = self
                .dm
                .get(i, j)
                .ok_or_else(|| Error::Contract(format!("agents {i} and {j} are unreachable")))?;
            hops[c.index()] += u64::from(h);
            diffs[c.index()] += self.state.expressed[j] - xi;
        }
        Ok([0, 1].map(|c| {
            let m = self.populations[c] as f64;
            (self.populations[c] > 0).then(|| (hops[c] as f64 / m, (diffs[c] / m).abs()))
        }))
    }

    fn utilities(&self, i: usize) -> Result<[Option<f64>; 2]> {
        let gaps = self.gaps(i)?;
        let delta = self.params.delta;
        let s = self.params.utility_sign.factor();
        Ok(gaps.map(|g| match g {
            Some((dist, gap)) => Some(s * (delta * dist + (1.0 - delta) * gap)),
            None => match self.params.empty_community {
                EmptyCommunityRule::ZeroProbability => None,
                EmptyCommunityRule::UniformFallback => Some(0.0),
            },
        }))
    }

    fn probabilities(&self, i: usize) -> Result<[f64; 2]> {
        softmax2(self.utilities(i)?)
    }
}

/// Numerically stable softmax over the included entries; excluded entries
/// get probability 0.
fn softmax2(u: [Option<f64>; 2]) -> Result<[f64; 2]> {
    let max = match (u[0], u[1]) {
        (Some(a), Some(b)) => a.max(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return Err(Error::Contract("both communities are empty".into())),
    };
    let e = u.map(|x| x.map_or(0.0, |x| (x - max).exp()));
    let total = e[0] + e[1];
    Ok([e[0] / total, e[1] / total])
}

/// Probability of agent `i` joining each community, given time-`t` opinions
/// and membership. Indexed by [`Community::index`].
pub fn migration_probabilities(
    i: usize,
    state: &OpinionState,
    assign: &CommunityAssignment,
    dm: &DistanceMatrix,
    params: &MigrationParams,
) -> Result<[f64; 2]> {
    Snapshot::new(state, assign, dm, params)?.probabilities(i)
}

/// Probability vectors for every agent.
pub fn all_probabilities(
    state: &OpinionState,
    assign: &CommunityAssignment,
    dm: &DistanceMatrix,
    params: &MigrationParams,
) -> Result<Vec<[f64; 2]>> {
    let snap = Snapshot::new(state, assign, dm, params)?;
    (0..assign.len()).map(|i| snap.probabilities(i)).collect()
}

/// One synchronous migration step.
///
/// Each unpinned agent draws `u ~ U[0, 1)` from its `(Migration, t, i)`
/// stream and stays in its current community iff `u < P(current)`.
/// Pinned agents keep their community.
pub fn step_migration(
    state: &OpinionState,
    assign: &CommunityAssignment,
    dm: &DistanceMatrix,
    params: &MigrationParams,
    streams: &Streams,
    exec: Exec,
) -> Result<CommunityAssignment> {
    let snap = Snapshot::new(state, assign, dm, params)?;
    let t = assign.t as u64;
    let decide = |i: usize| -> Result<Community> {
        if let Some(c) = params.pin_of(i) {
            return Ok(c);
        }
        let current = assign.assign[i];
        let p = snap.probabilities(i)?;
        let u = streams.uniform(Domain::Migration, t, i as u64);
        Ok(if u < p[current.index()] { current } else { current.other() })
    };
    let next: Result<Vec<Community>> = match exec {
        Exec::Serial => (0..assign.len()).map(decide).collect(),
        Exec::Parallel => (0..assign.len()).into_par_iter().map(decide).collect(),
    };
    Ok(CommunityAssignment::new(assign.t + 1, next?))
}
