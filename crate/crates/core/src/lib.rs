//! Agent-based simulation of opinion evolution coupled with migration
//! between two competing communities on a social graph.
//!
//! The pieces compose bottom-up:
//!
//! - [`graph`]: small-world and star graphs with hop-count distances,
//! - [`opinion`]: bounded-confidence update of private and expressed opinions,
//! - [`migration`]: softmax choice between two communities,
//! - [`metrics`]: growth/migration rates and fluctuation statistics,
//! - [`theorem`]: Monte Carlo checks of the consensus bound and the star
//!   graph leader expectation,
//! - [`config`], [`simulation`], [`artifacts`]: presets, run orchestration
//!   and on-disk output.
//!
//! ```
//! use opinion_migration::{config::preset, simulation::run_compound};
//!
//! let run = run_compound(&preset("fig5a").unwrap()).unwrap();
//! assert!(run.trajectory.populations.is_conserved(50));
//! ```

pub mod artifacts;
pub mod config;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod migration;
pub mod opinion;
pub mod rng;
pub mod simulation;
pub mod theorem;

pub use config::{load_config, list_presets, preset, SimConfig};
pub use error::{Error, Result};
pub use graph::{SocialGraph, StarGraph};
pub use migration::{Community, CommunityAssignment, MigrationParams};
pub use opinion::{Exec, OpinionParams, OpinionState};
pub use simulation::{run_batch, run_compound, Trajectory};
