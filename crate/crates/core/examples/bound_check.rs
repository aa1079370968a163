//! Monte Carlo mean spread against the geometric consensus bound.

use opinion_migration::theorem::check_theorem1;
use opinion_migration::OpinionParams;

fn main() -> opinion_migration::Result<()> {
    let report = check_theorem1(&OpinionParams::new(1.0, 0.5, 0.4), 50, 100, 20, 1, false)?;
    println!("{}", report.summary());

    // outside phi + sigma < 1 the check refuses unless forced
    let err = check_theorem1(&OpinionParams::new(1.0, 0.5, 0.9), 50, 10, 5, 1, false).unwrap_err();
    println!("phi=0.5 sigma=0.9: {err}");
    Ok(())
}
