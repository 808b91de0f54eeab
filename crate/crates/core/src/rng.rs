//! Counter-based random streams.
//!
//! Every random draw in an episode comes from a ChaCha8 stream keyed by
//! `(seed, purpose)` and positioned by the round index, so the draw of
//! round `t` does not depend on how many draws earlier rounds consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Losses = 1,
    Sampling = 2,
}

/// The generator for round `t` of the given purpose.
pub fn round_rng(seed: u64, purpose: Purpose, t: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(t);
    rng
}
