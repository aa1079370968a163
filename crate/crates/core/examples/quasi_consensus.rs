//! How fast expressed opinions collapse for the fig1 parameter sets.

use opinion_migration::metrics::median_time;
use opinion_migration::opinion::{consensus_time, simulate_opinions, Exec, NoiseMode};
use opinion_migration::preset;
use opinion_migration::rng::replicate_seed;

fn main() -> opinion_migration::Result<()> {
    for name in ["fig1a", "fig1b", "fig1c"] {
        let c = preset(name)?;
        for noise in [NoiseMode::PerAgent, NoiseMode::Shared] {
            let mut params = c.opinion;
            params.noise = noise;
            let times: Vec<_> = (0..50)
                .map(|r| {
                    let run = simulate_opinions(c.n(), &params, None, c.horizon, replicate_seed(c.seed, r), Exec::Serial)?;
                    Ok(consensus_time(&run.spreads, 0.01, 10))
                })
                .collect::<opinion_migration::Result<_>>()?;
            println!(
                "{name} d={} phi={} sigma={} noise={noise:?}: median consensus t = {:?}, never = {}",
                params.d,
                params.phi,
                params.sigma,
                median_time(&times),
                times.iter().filter(|t| t.is_none()).count()
            );
        }
    }

    // one trajectory in detail
    let c = preset("fig1a")?;
    let run = simulate_opinions(c.n(), &c.opinion, None, 15, c.seed, Exec::Serial)?;
    for (t, s) in run.spreads.iter().enumerate() {
        println!("t={t:>2} spread={s:.5}");
    }
    Ok(())
}
