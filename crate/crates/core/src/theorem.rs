//! Monte Carlo checks of the consensus bound and the star-graph leader
//! expectation.

use serde::Serialize;
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

use crate::error::{Error, Result};
use crate::graph::{gen_small_world, gen_star, SocialGraph};
use crate::metrics::{mean, median_time, sample_std_dev};
use crate::migration::{all_probabilities, init_assignment, step_migration, Community, MigrationParams, Pin};
use crate::opinion::{
    init_opinions, simulate_opinions, spread, step_opinions, Exec, NeighborhoodMode, OpinionParams, CONSENSUS_EPS,
    CONSENSUS_WINDOW,
};
use crate::rng::{replicate_seed, Streams};
use crate::simulation::map_replicates;

/// Upper bound `sigma * (phi + sigma)^(2t) * k0` on the expected expressed
/// spread at step `t`.
pub fn theorem1_bound(k0: f64, phi: f64, sigma: f64, t: usize) -> f64 {
    sigma * (phi + sigma).powi(2 * t as i32) * k0
}

/// Multiplicative slack on the bound that absorbs Monte Carlo error.
pub const BOUND_SLACK: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRow {
    pub t: usize,
    pub empirical_mean: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub d: f64,
    pub phi: f64,
    pub sigma: f64,
    pub n: usize,
    pub replicates: usize,
    pub horizon: usize,
    pub slack: f64,
    /// Mean initial private spread `k0` over replicates.
    pub mean_initial_spread: f64,
    /// Set when the run was forced outside `phi + sigma < 1`.
    pub exploratory: bool,
    pub rows: Vec<BoundRow>,
    pub all_pass: bool,
}

impl BoundReport {
    pub fn summary(&self) -> String {
        let mut s = format!(
            "consensus bound check: d={} phi={} sigma={} n={} R={} T={} slack={}\n",
            self.d, self.phi, self.sigma, self.n, self.replicates, self.horizon, self.slack
        );
        if self.exploratory {
            s.push_str("  (exploratory: phi + sigma >= 1, bound not guaranteed)\n");
        }
        for r in &self.rows {
            s.push_str(&format!(
                "  t={:>3}  mean spread={:.6e}  bound={:.6e}  {}\n",
                r.t,
                r.empirical_mean,
                r.bound,
                if r.pass { "ok" } else { "FAIL" }
            ));
        }
        s.push_str(if self.all_pass { "result: PASS\n" } else { "result: FAIL\n" });
        s
    }
}

/// Compare the replicate-mean expressed spread against the bound for
/// `t = 0..=horizon`. Refuses `phi + sigma >= 1` unless `force` is set.
pub fn check_theorem1(
    params: &OpinionParams,
    n: usize,
    replicates: usize,
    horizon: usize,
    seed: u64,
    force: bool,
) -> Result<BoundReport> {
    params.validate()?;
    if replicates == 0 {
        return Err(Error::param("replicates", "must be at least 1"));
    }
    if !params.in_contraction_regime() && !force {
        return Err(Error::TheoremScope(format!(
            "phi + sigma = {} >= 1; pass the exploratory flag to run anyway",
            params.phi + params.sigma
        )));
    }
    let runs = map_replicates(replicates, |r| {
        let rs = replicate_seed(seed, r as u64);
        let graph = match params.neighborhood {
            NeighborhoodMode::OpinionOnly => None,
            NeighborhoodMode::GraphAndOpinion => Some(gen_small_world(n, 4, 0.3, rs)?),
        };
        let run = simulate_opinions(n, params, graph.as_ref(), horizon, rs, Exec::Serial)?;
        Ok((run.initial_private_spread(), run.spreads))
    })?;
    let k0 = mean(&runs.iter().map(|(k, _)| *k).collect::<Vec<_>>());
    let rows: Vec<BoundRow> = (0..=horizon)
        .map(|t| {
            let empirical_mean = mean(&runs.iter().map(|(_, s)| s[t]).collect::<Vec<_>>());
            let bound = theorem1_bound(k0, params.phi, params.sigma, t);
            BoundRow {
                t,
                empirical_mean,
                bound,
                pass: empirical_mean <= bound * BOUND_SLACK,
            }
        })
        .collect();
    Ok(BoundReport {
        d: params.d,
        phi: params.phi,
        sigma: params.sigma,
        n,
        replicates,
        horizon,
        slack: BOUND_SLACK,
        mean_initial_spread: k0,
        exploratory: !params.in_contraction_regime(),
        all_pass: rows.iter().all(|r| r.pass),
        rows,
    })
}

/// The printed closed form `sum_{z=1}^{n} p^(z-1) (1-p)^(n-z) z` with
/// `p = e^(2 delta) / m`. It carries no binomial coefficient.
pub fn leader_expectation_closed_form(n: usize, delta: f64, m: f64) -> f64 {
    printed_leader_sum(n, (2.0 * delta).exp() / m)
}

/// The printed sum as a function of the leaf probability `p`.
pub fn printed_leader_sum(n: usize, p: f64) -> f64 {
    (1..=n)
        .map(|z| p.powi(z as i32 - 1) * (1.0 - p).powi((n - z) as i32) * z as f64)
        .sum()
}

/// Total mass of the printed pmf `P(Y = z) = p^(z-1) (1-p)^(n-z)`.
pub fn printed_pmf_total(n: usize, p: f64) -> f64 {
    (1..=n)
        .map(|z| p.powi(z as i32 - 1) * (1.0 - p).powi((n - z) as i32))
        .sum()
}

/// Mean of `1 + Binomial(n - 1, p)`: the pinned center plus independent leaves.
pub fn leader_expectation_binomial(n: usize, p: f64) -> f64 {
    1.0 + (n.saturating_sub(1)) as f64 * p
}

/// Normaliser from the closed form when both community distances are 2 and
/// opinions have converged: `M = 2 e^(2 delta)`.
pub fn simplified_normalizer(delta: f64) -> f64 {
    2.0 * (2.0 * delta).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeaderOptions {
    pub opinion: OpinionParams,
    pub consensus_eps: f64,
    pub consensus_window: usize,
    /// Extra steps after consensus before sampling.
    pub margin: usize,
    pub samples_per_replicate: usize,
}

impl Default for LeaderOptions {
    fn default() -> Self {
        LeaderOptions {
            opinion: OpinionParams::new(1.0, 0.5, 0.4),
            consensus_eps: CONSENSUS_EPS,
            consensus_window: CONSENSUS_WINDOW,
            margin: 10,
            samples_per_replicate: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reading {
    pub label: &'static str,
    pub p: f64,
    pub printed_formula: f64,
    pub binomial: f64,
    /// `(mc_mean - binomial) / mc_se`.
    pub z_binomial: f64,
    pub z_printed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareFit {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub bins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeaderReport {
    pub n: usize,
    pub delta: f64,
    pub replicates: usize,
    pub samples: usize,
    pub median_consensus_time: Option<f64>,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub ci95: [f64; 2],
    /// (a): both distances taken as 2, so `p = 1/2`.
    pub simplified: Reading,
    /// (b): leaf probability from the engine at the sampled states.
    pub engine: Reading,
    pub fit_engine_binomial: Option<ChiSquareFit>,
    /// Closed forms whose prediction lies within 3 standard errors.
    pub supported: Vec<String>,
    pub caveats: Vec<String>,
}

impl LeaderReport {
    pub fn summary(&self) -> String {
        let mut s = format!(
            "leader check: star n={} delta={} R={} samples={}\n  Monte Carlo E[Y_k] = {:.4} (se {:.4}, 95% CI [{:.4}, {:.4}])\n",
            self.n, self.delta, self.replicates, self.samples, self.mc_mean, self.mc_se, self.ci95[0], self.ci95[1]
        );
        for r in [&self.simplified, &self.engine] {
            s.push_str(&format!(
                "  {}: p={:.6}  binomial 1+(n-1)p={:.4} (z={:+.2})  printed sum={:.4} (z={:+.2})\n",
                r.label, r.p, r.binomial, r.z_binomial, r.printed_formula, r.z_printed
            ));
        }
        if let Some(f) = &self.fit_engine_binomial {
            s.push_str(&format!(
                "  chi-square vs 1+Binomial(n-1, p_engine): stat={:.3} df={} p={:.4}\n",
                f.statistic, f.df, f.p_value
            ));
        }
        s.push_str(&format!("  supported: {}\n", if self.supported.is_empty() { "none".into() } else { self.supported.join(", ") }));
        for c in &self.caveats {
            s.push_str(&format!("  caveat: {c}\n"));
        }
        s
    }
}

struct LeaderSample {
    y: usize,
    p_leaf: f64,
}

/// Star graph with the center pinned to community A (`Q_k`): run opinions to
/// consensus, wait `margin` steps, then sample `Y_k` after each of
/// `samples_per_replicate` migration steps. `horizon` caps the steps allowed
/// for consensus to appear.
pub fn check_theorem2(
    n: usize,
    delta: f64,
    replicates: usize,
    horizon: usize,
    seed: u64,
    opts: &LeaderOptions,
) -> Result<LeaderReport> {
    let star = gen_star(n)?;
    opts.opinion.validate()?;
    if replicates == 0 || opts.samples_per_replicate == 0 {
        return Err(Error::param("replicates", "need at least one replicate and one sample"));
    }
    let mut mig = MigrationParams::with_delta(delta);
    mig.pinned = vec![Pin {
        agent: star.center(),
        community: Community::A,
    }];
    mig.validate(n)?;
    let per_rep = map_replicates(replicates, |r| {
        leader_replicate(star.graph(), &mig, opts, horizon, replicate_seed(seed, r as u64))
    })?;
    let consensus: Vec<Option<usize>> = per_rep.iter().map(|(tc, _)| Some(*tc)).collect();
    let samples: Vec<&LeaderSample> = per_rep.iter().flat_map(|(_, s)| s).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.y as f64).collect();
    let mc_mean = mean(&ys);
    let mc_se = sample_std_dev(&ys) / (ys.len() as f64).sqrt();
    let p_engine = mean(&samples.iter().map(|s| s.p_leaf).collect::<Vec<_>>());
    let p_simple = (2.0 * delta).exp() / simplified_normalizer(delta);

    let z = |target: f64| {
        let diff = mc_mean - target;
        if mc_se > 0.0 {
            diff / mc_se
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    };
    let reading = |label, p: f64| {
        let binomial = leader_expectation_binomial(n, p);
        let printed = printed_leader_sum(n, p);
        Reading {
            label,
            p,
            printed_formula: printed,
            binomial,
            z_binomial: z(binomial),
            z_printed: z(printed),
        }
    };
    let simplified = reading("simplified distances (p = e^{2 delta}/M, M = 2 e^{2 delta})", p_simple);
    let engine = reading("engine leaf probability", p_engine);

    let mut supported = Vec::new();
    for r in [&simplified, &engine] {
        if r.z_binomial.abs() <= 3.0 {
            supported.push(format!("binomial with {}", r.label));
        }
        if r.z_printed.abs() <= 3.0 {
            supported.push(format!("printed sum with {}", r.label));
        }
    }
    let leaves: Vec<usize> = samples.iter().map(|s| s.y - 1).collect();
    let fit = chi_square_binomial(&leaves, n - 1, p_engine);
    let caveats = vec![format!(
        "printed pmf sums to {:.6} at n={n}, p={p_simple} (no binomial coefficient)",
        printed_pmf_total(n, p_simple)
    )];
    Ok(LeaderReport {
        n,
        delta,
        replicates,
        samples: ys.len(),
        median_consensus_time: median_time(&consensus),
        mc_mean,
        mc_se,
        ci95: [mc_mean - 1.96 * mc_se, mc_mean + 1.96 * mc_se],
        simplified,
        engine,
        fit_engine_binomial: fit,
        supported,
        caveats,
    })
}

fn leader_replicate(
    graph: &SocialGraph,
    mig: &MigrationParams,
    opts: &LeaderOptions,
    horizon: usize,
    seed: u64,
) -> Result<(usize, Vec<LeaderSample>)> {
    let n = graph.node_count();
    let center = mig.pinned[0].agent;
    let dm = graph.distances();
    let streams = Streams::new(seed);
    let mut state = init_opinions(n, opts.opinion.sigma, &streams)?;
    let mut assign = init_assignment(n, mig, &streams)?;
    let mut below = usize::from(spread(&state) < opts.consensus_eps);
    let mut consensus_at = (below >= opts.consensus_window).then_some(0);
    let mut samples = Vec::with_capacity(opts.samples_per_replicate);
    let mut t = 0;
    while samples.len() < opts.samples_per_replicate {
        if consensus_at.is_none() && t >= horizon {
            return Err(Error::ConsensusNotReached { horizon });
        }
        state = step_opinions(&state, &opts.opinion, Some(graph), &streams, Exec::Serial)?.state;
        t += 1;
        let sampling = consensus_at.is_some_and(|tc| t > tc + opts.margin);
        let p_leaf = if sampling {
            let probs = all_probabilities(&state, &assign, dm, mig)?;
            let leaves: Vec<f64> = (0..n).filter(|&i| i != center).map(|i| probs[i][Community::A.index()]).collect();
            Some(mean(&leaves))
        } else {
            None
        };
        assign = step_migration(&state, &assign, dm, mig, &streams, Exec::Serial)?;
        if let Some(p_leaf) = p_leaf {
            samples.push(LeaderSample {
                y: assign.populations()[Community::A.index()],
                p_leaf,
            });
        }
        if consensus_at.is_none() {
            below = if spread(&state) < opts.consensus_eps { below + 1 } else { 0 };
            if below >= opts.consensus_window {
                consensus_at = Some(t + 1 - opts.consensus_window);
            }
        }
    }
    Ok((consensus_at.expect("sampling only starts after consensus"), samples))
}

/// Pearson chi-square of leaf counts against `Binomial(trials, p)`, pooling
/// adjacent cells until each expects at least 5. One extra degree of
/// freedom is removed for the estimated `p`.
pub fn chi_square_binomial(counts: &[usize], trials: usize, p: f64) -> Option<ChiSquareFit> {
    let total = counts.len() as f64;
    let dist = Binomial::new(p.clamp(0.0, 1.0), trials as u64).ok()?;
    let mut observed = vec![0f64; trials + 1];
    for &c in counts {
        observed[c.min(trials)] += 1.0;
    }
    let expected: Vec<f64> = (0..=trials).map(|k| total * dist.pmf(k as u64)).collect();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for k in 0..=trials {
        o += observed[k];
        e += expected[k];
        if e >= 5.0 {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if let Some(last) = cells.last_mut() {
        last.0 += o;
        last.1 += e;
    }
    if cells.len() < 3 {
        return None;
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let df = cells.len() - 2;
    let p_value = ChiSquared::new(df as f64).ok()?.sf(statistic);
    Some(ChiSquareFit {
        statistic,
        df,
        p_value,
        bins: cells.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        assert_eq!(theorem1_bound(0.8, 0.5, 0.4, 0), 0.4 * 0.8);
        assert!((theorem1_bound(1.0, 0.5, 0.4, 1) - 0.324).abs() < 1e-15);
        let b50 = theorem1_bound(1.0, 0.5, 0.4, 50);
        assert!(b50 < 1e-4 && b50 < theorem1_bound(1.0, 0.5, 0.4, 49));
    }

    #[test]
    fn printed_formula_examples() {
        assert_eq!(printed_leader_sum(1, 0.3), 1.0);
        assert!((printed_leader_sum(3, 0.5) - 1.5).abs() < 1e-15);
        assert!((printed_leader_sum(2, 0.5) - 1.5).abs() < 1e-15);
        let delta = 0.37;
        assert!((leader_expectation_closed_form(3, delta, simplified_normalizer(delta)) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(leader_expectation_binomial(7, 0.0), 1.0);
        assert_eq!(leader_expectation_binomial(7, 1.0), 7.0);
        assert_eq!(leader_expectation_binomial(3, 0.5), 2.0);
        assert_eq!(leader_expectation_binomial(2, 0.3), 1.3);
    }

    #[test]
    fn printed_and_binomial_disagree() {
        assert_eq!(printed_leader_sum(3, 0.5), 1.5);
        assert_eq!(leader_expectation_binomial(3, 0.5), 2.0);
        assert!((printed_pmf_total(3, 0.5) - 0.75).abs() < 1e-15);
        // boundary: a single agent is the pinned center on both readings
        assert_eq!(printed_leader_sum(1, 0.5), leader_expectation_binomial(1, 0.5));
    }

    #[test]
    fn refuses_outside_regime() {
        let p = OpinionParams::new(1.0, 0.5, 0.9);
        assert!(matches!(check_theorem1(&p, 20, 5, 5, 0, false), Err(Error::TheoremScope(_))));
        let r = check_theorem1(&p, 20, 5, 5, 0, true).unwrap();
        assert!(r.exploratory);
    }

    #[test]
    fn zero_sigma_trivially_passes() {
        let p = OpinionParams::new(1.0, 0.5, 0.0);
        let r = check_theorem1(&p, 30, 10, 10, 1, false).unwrap();
        assert!(r.rows.iter().all(|row| row.empirical_mean == 0.0));
        assert!(r.all_pass);
    }

    #[test]
    fn two_agent_star() {
        let r = check_theorem2(2, 0.6, 400, 200, 3, &LeaderOptions::default()).unwrap();
        assert!(r.mc_mean >= 1.0 && r.mc_mean <= 2.0);
        assert!((r.engine.binomial - (1.0 + r.engine.p)).abs() < 1e-15);
        assert!(r.engine.z_binomial.abs() < 4.0);
    }

    #[test]
    fn simplified_reading_is_half() {
        let r = check_theorem2(5, 0.9, 50, 200, 1, &LeaderOptions::default()).unwrap();
        assert_eq!(r.simplified.p, 0.5);
        assert_eq!(r.simplified.binomial, 1.0 + 4.0 * 0.5);
    }

    #[test]
    fn consensus_must_appear() {
        let opts = LeaderOptions {
            opinion: OpinionParams::new(1.0, 0.5, 0.4),
            ..Default::default()
        };
        assert!(matches!(
            check_theorem2(5, 0.5, 3, 2, 0, &opts),
            Err(Error::ConsensusNotReached { horizon: 2 })
        ));
    }

    #[test]
    fn chi_square_accepts_exact_binomial_counts() {
        let dist = Binomial::new(0.4, 10).unwrap();
        let mut counts = Vec::new();
        for k in 0..=10u64 {
            let c = (5000.0 * dist.pmf(k)).round() as usize;
            counts.extend(std::iter::repeat_n(k as usize, c));
        }
        let fit = chi_square_binomial(&counts, 10, 0.4).unwrap();
        assert!(fit.p_value > 0.99, "{fit:?}");
        let skewed = vec![0usize; 3000];
        let fit = chi_square_binomial(&skewed, 10, 0.4).unwrap();
        assert!(fit.p_value < 1e-6);
    }
}
