//! List presets, then run one and write its artifact bundle.
//!
//!     OPMIG_OUT_DIR=/tmp/fig5a cargo run --example presets -- fig5a

use opinion_migration::artifacts::{resolve_out_dir, write_bundle};
use opinion_migration::{list_presets, preset, run_batch};

fn main() -> opinion_migration::Result<()> {
    for p in list_presets() {
        println!("{:<14} {}", p.name, p.summary);
    }

    let name = std::env::args().nth(1).unwrap_or_else(|| "fig5a".into());
    let mut config = preset(&name)?;
    config.replicates = 4;
    let batch = run_batch(&config, None)?;
    let dir = resolve_out_dir(None, &config);
    for f in write_bundle(&dir, &config, &batch)? {
        println!("wrote {}", f.display());
    }
    for s in &batch.summaries {
        println!("replicate {} consensus {:?} final A/B {:?}", s.replicate, s.consensus_time, s.final_populations);
    }
    Ok(())
}
