//! Opinions and migration together: population paths for a few delta values.
//!
//!     cargo run --example compound_migration

use opinion_migration::metrics::windowed_rates;
use opinion_migration::{preset, run_compound};

fn main() -> opinion_migration::Result<()> {
    for name in ["fig5a", "fig5b", "fig6"] {
        let c = preset(name)?;
        let run = run_compound(&c)?;
        let pops = &run.trajectory.populations;
        let path: Vec<String> = pops.counts.iter().step_by(15).map(|[a, b]| format!("{a}/{b}")).collect();
        println!("{name} delta={}: A/B every 15 steps: {}", c.migration.delta, path.join(" "));

        let rates = windowed_rates(pops, c.rate_window)?;
        let moved = rates.iter().filter(|r| r.ngr != 0.0).count();
        println!("  windows with net change: {moved}/{}", rates.len());
    }
    Ok(())
}
