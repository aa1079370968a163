//! Deterministic random streams.
//!
//! Every draw in a simulation is keyed by `(seed, domain, t, index)`, so each
//! agent owns an independent stream per step. Serial and parallel execution
//! therefore consume exactly the same numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Separates the purposes random numbers are drawn for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Graph = 1,
    InitOpinion = 2,
    Noise = 3,
    InitAssignment = 4,
    Migration = 5,
    Replicate = 6,
}

const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(SPLITMIX_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash a key tuple into a 64-bit sub-seed.
pub fn derive_seed(seed: u64, domain: Domain, t: u64, index: u64) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ (domain as u64));
    h = splitmix64(h ^ t);
    splitmix64(h ^ index)
}

/// Master seed for replicate `r` of a run seeded with `master`.
pub fn replicate_seed(master: u64, r: u64) -> u64 {
    derive_seed(master, Domain::Replicate, 0, r)
}

/// Factory for keyed sub-streams under one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Streams {
    seed: u64,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Streams { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&self, domain: Domain, t: u64, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(derive_seed(self.seed, domain, t, index))
    }

    /// First uniform `[0, 1)` draw of the keyed stream.
    pub fn uniform(&self, domain: Domain, t: u64, index: u64) -> f64 {
        self.rng(domain, t, index).gen::<f64>()
    }
}
