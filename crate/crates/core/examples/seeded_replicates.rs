// Replicate seeds are derived from the master seed, so any subset of the
// batch can be rerun alone and worker count never changes results.

use opinion_migration::rng::replicate_seed;
use opinion_migration::simulation::simulate_replicate;
use opinion_migration::{preset, run_batch, Exec};

fn main() -> opinion_migration::Result<()> {
    let mut config = preset("fig2a")?;
    config.replicates = 8;
    let one = run_batch(&config, Some(1))?;
    let many = run_batch(&config, Some(4))?;
    assert_eq!(one, many);

    let r5 = simulate_replicate(&config, 5, Exec::Parallel)?;
    assert_eq!(r5.seed, replicate_seed(config.seed, 5));
    assert_eq!(r5.trajectory.spreads.len(), config.horizon + 1);
    for s in &one.summaries {
        println!("r={} seed={:#018x} consensus={:?}", s.replicate, s.seed, s.consensus_time);
    }
    Ok(())
}
