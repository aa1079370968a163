// Migration probabilities for one agent on a path graph, by delta.

use opinion_migration::graph::SocialGraph;
use opinion_migration::migration::{migration_probabilities, Community, CommunityAssignment, MigrationParams};
use opinion_migration::OpinionState;

fn main() -> opinion_migration::Result<()> {
    // 0 - 1 - 2 - 3 - 4, agent 0 in A with agent 1, the rest in B.
    let g = SocialGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)])?;
    use Community::{A, B};
    let assign = CommunityAssignment::new(0, vec![A, A, B, B, B]);
    let state = OpinionState::from_private(0, vec![0.1, 0.2, 0.7, 0.8, 0.9], 1.0);

    for delta in [0.0, 0.3, 0.5, 0.8, 1.0] {
        let p = migration_probabilities(0, &state, &assign, g.distances(), &MigrationParams::with_delta(delta))?;
        println!("delta={delta:.1}  P(A)={:.4}  P(B)={:.4}", p[0], p[1]);
    }
    Ok(())
}
