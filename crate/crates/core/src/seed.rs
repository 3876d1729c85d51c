//! Seed derivation and the portable PRNG.
//!
//! Per-instance seeds are the first eight bytes (little endian) of
//! SHA-256 over `master (u64 LE) || task_id (UTF-8) || 0x00 || value (i64 LE)
//! || index (u64 LE)`. Each seed drives a ChaCha8 stream
//! (`rand_chacha::ChaCha8Rng::seed_from_u64`), whose output is fixed across
//! platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

pub fn derive_seed(master: u64, task_id: &str, variable_value: i32, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(task_id.as_bytes());
    h.update([0u8]);
    h.update(i64::from(variable_value).to_le_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 has 32 bytes"))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
