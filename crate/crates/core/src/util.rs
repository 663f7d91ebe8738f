use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// The one RNG used by every seeded operation.
pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for worker / cell `index` derived from a base seed: `seed + index`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
