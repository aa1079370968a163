//! Watts-Strogatz graphs at a few rewiring probabilities, plus the star graph.
//!
//!     cargo run --example small_world -- 100 0.3

use opinion_migration::graph::{gen_small_world, gen_star};

fn main() -> opinion_migration::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(50, |s| s.parse().expect("n"));
    let focus: f64 = args.next().map_or(0.3, |s| s.parse().expect("p"));

    println!("{:>6} {:>6} {:>10} {:>8}", "p", "edges", "mean path", "max deg");
    for p in [0.0, 0.05, focus, 1.0] {
        let g = gen_small_world(n, 4, p, 7)?;
        let max_deg = (0..n).map(|i| g.degree(i)).max().unwrap_or(0);
        println!("{p:>6.2} {:>6} {:>10.3} {max_deg:>8}", g.edge_count(), g.mean_path_length());
    }

    let star = gen_star(6)?;
    print!("star(6) as JSON: {}", star.graph().to_document(Some(star.center())).to_json()?);
    Ok(())
}
