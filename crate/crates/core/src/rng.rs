//! Counter-based random streams.
//!
//! Every Monte Carlo round gets its own ChaCha stream keyed by the run seed,
//! so a round's draws do not depend on how rounds are split across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RoundStreams {
    key: <ChaCha8Rng as SeedableRng>::Seed,
}

impl RoundStreams {
    pub fn new(seed: u64) -> Self {
        Self { key: ChaCha8Rng::seed_from_u64(seed).get_seed() }
    }

    /// Generator for round `index`.
    pub fn round(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }
}
