//! Spread over time near phi = sigma = 1, and the fluctuation range as d shrinks.

use opinion_migration::metrics::{default_burn_in, fluctuation_range, mean};
use opinion_migration::opinion::{simulate_opinions, Exec, OpinionParams};

fn main() -> opinion_migration::Result<()> {
    let horizon = 200;
    for (d, phi, sigma) in [(1.0, 1.0, 1.0), (1.0, 1.0, 0.99), (1.0, 0.99, 1.0), (0.3, 1.0, 1.0)] {
        let run = simulate_opinions(50, &OpinionParams::new(d, phi, sigma), None, horizon, 3, Exec::Serial)?;
        let s = &run.spreads;
        println!(
            "d={d} phi={phi} sigma={sigma}: spread t=0 {:.4}, t=1 {:.4}, t=50 {:.2e}, t=200 {:.2e}",
            s[0], s[1], s[50], s[200]
        );
    }

    println!();
    for d in [1.0, 0.5, 0.1] {
        let run = simulate_opinions(50, &OpinionParams::new(d, 1.0, 1.0), None, horizon, 3, Exec::Serial)?;
        let per_agent = |burn| -> opinion_migration::Result<f64> {
            let r: Vec<f64> = (0..50).map(|i| fluctuation_range(&run.agent_series(i), burn)).collect::<Result<_, _>>()?;
            Ok(mean(&r))
        };
        println!(
            "d={d}: mean agent range over whole run {:.4}, after burn-in {:.2e}",
            per_agent(0)?,
            per_agent(default_burn_in(horizon))?
        );
    }
    Ok(())
}
