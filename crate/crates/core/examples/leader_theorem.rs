//! Stationary size of the leader's community on a star graph.
//!
//! Compares the Monte Carlo mean with the printed closed form and with the
//! binomial expectation 1 + (n - 1) p.

use opinion_migration::theorem::{check_theorem2, leader_expectation_binomial, printed_leader_sum, LeaderOptions};

fn main() -> opinion_migration::Result<()> {
    println!("n=3 p=0.5: printed sum {} vs binomial {}", printed_leader_sum(3, 0.5), leader_expectation_binomial(3, 0.5));

    let replicates = std::env::args().nth(1).map_or(400, |s| s.parse().expect("replicates"));
    for delta in [0.3, 0.8] {
        let report = check_theorem2(21, delta, replicates, 200, 5, &LeaderOptions::default())?;
        println!("{}", report.summary());
    }
    Ok(())
}
